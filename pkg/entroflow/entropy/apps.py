from django.apps import AppConfig


class EntropyConfig(AppConfig):
    name = 'entropy'
    verbose_name = 'Энтропии'
