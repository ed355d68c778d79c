from django.apps import AppConfig


class UnitaryConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.unitary'
    verbose_name = 'Closed-system dynamics'
