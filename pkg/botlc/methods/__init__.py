"""
Guidance methods: estimator/controller pairs behind one interface
"""
from typing import Dict, Type

from botlc.methods.base_method import BaseMethod
from botlc.methods.cao import CaoMethod
from botlc.methods.chen import ChenMethod
from botlc.methods.deghat import DeghatMethod
from botlc.methods.proposed import ProposedMethod

METHODS: Dict[str, Type[BaseMethod]] = {
    cls.name: cls for cls in (ProposedMethod, DeghatMethod, CaoMethod, ChenMethod)
}


def register_method(cls: Type[BaseMethod]) -> Type[BaseMethod]:
    """Class decorator adding a method to the registry under `cls.name`"""
    if not cls.name:
        raise ValueError(f"{cls.__name__} must define a non-empty name")
    METHODS[cls.name] = cls
    return cls


def get_method(name: str) -> Type[BaseMethod]:
    try:
        return METHODS[name]
    except KeyError:
        raise ValueError(f"unknown method '{name}', expected one of {sorted(METHODS)}") from None


__all__ = [
    'BaseMethod',
    'ProposedMethod',
    'DeghatMethod',
    'CaoMethod',
    'ChenMethod',
    'METHODS',
    'get_method',
    'register_method',
]
