"""Sentinel for measurements outside device limits.

Kept as a distinct singleton rather than a large stand-in number so that
medians and ordinal recodings have to treat it explicitly.
"""


class OutsideLimits:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OL"

    def __reduce__(self):
        return (OutsideLimits, ())


OL = OutsideLimits()


def is_ol(value) -> bool:
    return isinstance(value, OutsideLimits)
