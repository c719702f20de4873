from __future__ import annotations

from typing import Literal, Optional

from typing_extensions import TypedDict

ErrorCode = Literal[
    "invalid_code_spec",
    "invalid_config",
    "framing_error",
    "channel_error",
    "gf_error",
    "rs_error",
    "oracle_limit",
    "file_format",
    "sweep_point_failed",
]


class SvadNtcErrorDict(TypedDict):
    name: str
    message: str
    code: ErrorCode


class SvadNtcError(Exception):
    def __init__(self, message: str, code: ErrorCode) -> None:
        Exception.__init__(self, message)
        self.message = message
        self.name = "SvadNtcError"
        self.code = code

    def to_dict(self) -> SvadNtcErrorDict:
        return {
            "name": self.name,
            "message": self.message,
            "code": self.code,
        }


class CodeSpecError(SvadNtcError):
    def __init__(self, message: str) -> None:
        SvadNtcError.__init__(self, message, "invalid_code_spec")
        self.name = "CodeSpecError"


class ConfigErrorDict(SvadNtcErrorDict):
    flag: Optional[str]


class ConfigError(SvadNtcError):
    def __init__(self, message: str, flag: Optional[str] = None) -> None:
        SvadNtcError.__init__(self, message, "invalid_config")
        self.name = "ConfigError"
        self.flag = flag

    def to_dict(self) -> ConfigErrorDict:
        return {
            "name": self.name,
            "message": self.message,
            "code": self.code,
            "flag": self.flag,
        }


class FramingError(SvadNtcError):
    def __init__(self, message: str) -> None:
        SvadNtcError.__init__(self, message, "framing_error")
        self.name = "FramingError"


class ChannelError(SvadNtcError):
    def __init__(self, message: str) -> None:
        SvadNtcError.__init__(self, message, "channel_error")
        self.name = "ChannelError"


class GaloisFieldError(SvadNtcError):
    def __init__(self, message: str) -> None:
        SvadNtcError.__init__(self, message, "gf_error")
        self.name = "GaloisFieldError"


class ReedSolomonError(SvadNtcError):
    def __init__(self, message: str) -> None:
        SvadNtcError.__init__(self, message, "rs_error")
        self.name = "ReedSolomonError"


class OracleLimitError(SvadNtcError):
    def __init__(self, message: str, free_steps: int) -> None:
        SvadNtcError.__init__(self, message, "oracle_limit")
        self.name = "OracleLimitError"
        self.free_steps = free_steps


class FileFormatError(SvadNtcError):
    def __init__(self, message: str) -> None:
        SvadNtcError.__init__(self, message, "file_format")
        self.name = "FileFormatError"


class SweepPointError(SvadNtcError):
    def __init__(
        self,
        ebno_db: float,
        scheme: str,
        original_error: Exception,
        ntc_count: Optional[int] = None,
    ) -> None:
        point = f"ebno_db={ebno_db:g} scheme={scheme}"
        if ntc_count is not None:
            point += f" ntc={ntc_count}"
        SvadNtcError.__init__(
            self,
            f"{point}: {original_error}",
            "sweep_point_failed",
        )
        self.name = "SweepPointError"
        self.ebno_db = ebno_db
        self.scheme = scheme
        self.ntc_count = ntc_count
        self.original_error = original_error
