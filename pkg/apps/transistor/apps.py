from django.apps import AppConfig


class TransistorConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.transistor'
    verbose_name = 'Quantum transistor experiments'
