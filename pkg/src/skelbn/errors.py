class InputError(ValueError):
    """Malformed or invalid input: data files, schemas, network files."""


class InternalBoundError(RuntimeError):
    """An internal iteration cap was exceeded; indicates a bug or pathological input."""
