from django.apps import AppConfig


class ZiberConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'ziber'
    verbose_name = 'Zero-inflated Bernoulli regression'
