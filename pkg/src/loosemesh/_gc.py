import gc
from contextlib import contextmanager


@contextmanager
def gc_paused():
    """Suspend the cyclic collector while millions of long-lived objects are built."""
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()
