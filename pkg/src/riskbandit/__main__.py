import sys

import django
from django.conf import settings
from django.core.management import ManagementUtility

from .conf import DEFAULTS


def main(argv=None):
    if not settings.configured:
        settings.configure(**DEFAULTS)
    django.setup()

    argv = list(sys.argv[1:] if argv is None else argv)
    ManagementUtility(['riskbandit'] + argv).execute()


if __name__ == '__main__':
    main()
