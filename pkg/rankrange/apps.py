from django.apps import AppConfig


class RankrangeConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "rankrange"
    verbose_name = "Rank-k numerical range"
