from django.apps import AppConfig


class ManifoldConfig(AppConfig):
    name = 'manifold'
    verbose_name = 'Многообразия'
