"""Bundled synthetic descriptors used by the docs, demos and acceptance runs."""

from importlib import resources

NAMES = ("quadratic", "quartic", "product2", "twocusp")


def fixture_path(name):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(NAMES)}")
    return resources.files(__package__) / f"{name}.json"


def load_fixture(name, dps=None):
    from ..manifold import load_manifold
    return load_manifold(str(fixture_path(name)), dps=dps)
