import dataclasses
import json
import math


class JSONEncoder(json.JSONEncoder):
    """
    JSONEncoder subclass for run manifests: config dataclasses and numpy
    arrays or scalars.

    Non-finite floats are written as ``null`` so manifests stay valid JSON.
    """
    def encode(self, obj):
        return super().encode(_finite(obj))

    def iterencode(self, obj, _one_shot=False):
        return super().iterencode(_finite(obj), _one_shot)

    def default(self, obj):
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return _finite(dataclasses.asdict(obj))
        elif hasattr(obj, 'tolist'):
            # Numpy arrays and array scalars.
            return _finite(obj.tolist())
        return super().default(obj)


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {key: _finite(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(item) for item in obj]
    return obj
