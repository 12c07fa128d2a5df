class InputError(ValueError):
    """Malformed or out-of-contract input.

    ``location`` is a JSON-pointer style path when the error comes from a
    manifest, otherwise a short description of the offending object.
    """

    def __init__(self, message, location=""):
        super().__init__(message)
        self.location = location

    def __str__(self):
        msg = super().__str__()
        if self.location:
            return "%s (at %s)" % (msg, self.location)
        return msg


class ResourceError(RuntimeError):
    """A configured arity, weight or size bound would be exceeded."""
