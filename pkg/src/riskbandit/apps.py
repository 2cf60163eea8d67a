from django.apps import AppConfig
from django.utils.translation import gettext_lazy as _


class RiskBanditConfig(AppConfig):
    name = 'riskbandit'
    verbose_name = _('Risk-stream bandit sampling')
