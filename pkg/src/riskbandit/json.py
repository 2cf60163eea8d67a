import json

from .encoder import JSONEncoder
from .exceptions import ConfigurationError

DEFAULT_DUMP_KWARGS = {
    'cls': JSONEncoder,
    'indent': 2,
    'sort_keys': True,
}


def checked_loads(value, **kwargs):
    """
    Decode a configuration document, passing already-decoded mappings through.

    Config sections arrive either as raw JSON text (from a file) or as a dict
    (from code or tests); both must end up as a dict.
    """
    if isinstance(value, dict):
        return value

    try:
        value = json.loads(value, **kwargs)
    except json.JSONDecodeError as exc:
        raise ConfigurationError('Invalid JSON config: {0}'.format(exc))

    if not isinstance(value, dict):
        raise ConfigurationError('A config document must be a JSON object, got {0}.'.format(type(value).__name__))

    return value


def read_config(path):
    with open(path, encoding='utf-8') as fp:
        text = fp.read()
    return checked_loads(text)


def dumps(value, **kwargs):
    """Serialize ``value`` deterministically (sorted keys, fixed indent, trailing newline)."""
    options = dict(DEFAULT_DUMP_KWARGS, **kwargs)
    return json.dumps(value, **options) + '\n'
