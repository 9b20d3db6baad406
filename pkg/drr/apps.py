from django.apps import AppConfig


class DrrConfig(AppConfig):
    name = 'drr'
    verbose_name = 'DRR estimation'
