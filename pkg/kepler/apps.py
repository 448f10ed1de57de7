from django.apps import AppConfig


class KeplerConfig(AppConfig):
    name = 'kepler'
    verbose_name = 'Задача Дирака–Кеплера'
    default_auto_field = 'django.db.models.BigAutoField'
