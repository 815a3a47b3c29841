"""Error type shared by every module.

Each failure carries a short machine-readable ``code`` (``OUT_OF_DOMAIN``,
``NOT_MONOTONE``, ...) so callers and the CLI can branch on it without
parsing messages.
"""


class LabError(ValueError):
    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
