from typing import Any

from django.conf import settings


def entroflow_setting(name: str) -> Any:
    """Значение численного параметра из settings.ENTROFLOW."""
    return settings.ENTROFLOW[name]
