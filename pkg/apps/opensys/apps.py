from django.apps import AppConfig


class OpensysConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.opensys'
    verbose_name = 'Open-system dynamics'
