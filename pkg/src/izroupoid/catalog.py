"""The builtin identity catalog shipped as ``data/catalog.txt``."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources
from types import MappingProxyType
from typing import Mapping

from .terms import AnyIdentity, ConditionalIdentity, Identity, parse_identity_file

I20_IDENTITY_COUNT = 63


class UnknownLabel(KeyError):
    pass


class IdentityCatalog(Mapping):
    """Read-only ordered map ``label -> Identity | ConditionalIdentity``."""

    def __init__(self, entries: Mapping[str, AnyIdentity]):
        self._entries = MappingProxyType(dict(entries))

    def __getitem__(self, label):
        try:
            return self._entries[label]
        except KeyError:
            raise UnknownLabel(label) from None

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def identity(self, label: str) -> Identity:
        """The entry as a plain identity; conditional entries are refused."""
        e = self[label]
        if isinstance(e, ConditionalIdentity):
            raise TypeError(f"{label} is conditional")
        return e

    def expand(self, spec: str) -> list[str]:
        """Resolve a label list such as ``"I,L3.3.1-L3.3.63"`` or ``"L3.3.*"``."""
        labels: list[str] = []
        for part in (p.strip() for p in spec.split(",")):
            if not part:
                continue
            if part.endswith("*"):
                found = [k for k in self if k.startswith(part[:-1])]
                if not found:
                    raise UnknownLabel(part)
                labels.extend(found)
            elif "-" in part and part not in self:
                lo, hi = (s.strip() for s in part.split("-", 1))
                keys = list(self)
                if lo not in self._entries or hi not in self._entries:
                    raise UnknownLabel(part)
                i, j = keys.index(lo), keys.index(hi)
                if i > j:
                    raise UnknownLabel(part)
                labels.extend(keys[i : j + 1])
            else:
                self[part]
                labels.append(part)
        return labels


@lru_cache(maxsize=None)
def builtin_catalog() -> IdentityCatalog:
    text = resources.files(__package__).joinpath("data/catalog.txt").read_text("utf-8")
    return IdentityCatalog(parse_identity_file(text))


def i20_identity_labels() -> list[str]:
    return [f"L3.3.{k}" for k in range(1, I20_IDENTITY_COUNT + 1)]
