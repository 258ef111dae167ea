"""Number rendering shared by the XML serializers and CSV writers."""

import math

_EXACT_INT_LIMIT = 2**53


def format_number(value) -> str:
    """Integral values print without a fractional part; others use repr().

    repr() of a float is the shortest string that parses back to the same
    value, so parse/format round-trips exactly.
    """
    if isinstance(value, int):
        return str(value)
    if math.isfinite(value) and value.is_integer() and abs(value) < _EXACT_INT_LIMIT:
        return str(int(value))
    return repr(float(value))
