from django.apps import AppConfig


class SpinchainConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.spinchain'
    verbose_name = 'XY spin-chain model'
