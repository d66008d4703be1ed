"""Status messages sent from the cab to the control room.

Wire format, one ASCII line per message:

    FTG1,<seq>,<timestamp>,<state>,<hr>,<bpm>,<speed>,<CRC>\n

Decimal fields are unpadded. CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection, no final XOR) over
every byte from the 'F' of the magic through the comma preceding the CRC, written as 4 uppercase hex digits.
"""
import binascii
import logging
import re
from collections import Counter
from contextlib import ExitStack
from dataclasses import dataclass, field
from pathlib import Path
from types import TracebackType
from typing import BinaryIO, Iterable, Optional, Type

from vigil.errors import FormatError
from vigil.fusion_fsm import DriverState
from vigil.heart_monitor import Vitality

_logger = logging.getLogger(__name__)

MAGIC = b"FTG1,"
_CRC_INITIAL_VALUE = 0xFFFF
_CRC_TEXT_LENGTH = 4
_FIELD_COUNT = 6
_MAX_SEQ = 2**32 - 1

STATE_CODES: dict[DriverState, str] = {
    DriverState.Awake: "AW",
    DriverState.Drowsy: "DR",
    DriverState.Sleepy: "SL",
    DriverState.Asleep: "AS",
    DriverState.Incapacitated: "IN",
}
HR_CODES: dict[Vitality, str] = {
    Vitality.Normal: "OK",
    Vitality.Bradycardia: "BR",
    Vitality.Tachycardia: "TA",
    Vitality.NoPulse: "NP",
    Vitality.Unknown: "NA",
}
UNKNOWN_BPM = -1

_UNSIGNED_PATTERN = re.compile(rb"0|[1-9][0-9]*")
_BPM_PATTERN = re.compile(rb"-1|0|[1-9][0-9]*")
_CRC_PATTERN = re.compile(rb"[0-9A-F]{4}")


class StatusMessageEncodingError(ValueError):
    pass


class StatusMessageFormatError(FormatError):
    pass


class StatusMessageIntegrityError(Exception):
    """The line is well framed but its checksum does not match. Counted apart from format errors."""


class TelemetryLogWriteError(Exception):
    pass


@dataclass(frozen=True)
class StatusMessage:
    seq: int
    timestamp: int
    state_code: str
    hr_code: str
    # In beats per minute, or UNKNOWN_BPM
    bpm: int
    # In units of 0.1 km/h
    speed: int

    @property
    def body(self) -> bytes:
        return (
            f"FTG1,{self.seq},{self.timestamp},{self.state_code},{self.hr_code},{self.bpm},{self.speed},"
        ).encode("ascii")

    @property
    def crc(self) -> int:
        return crc16_ccitt_false(self.body)


def crc16_ccitt_false(data: bytes) -> int:
    return binascii.crc_hqx(data, _CRC_INITIAL_VALUE)


def _validate(msg: StatusMessage) -> None:
    for name in ("seq", "timestamp", "bpm", "speed"):
        if type(getattr(msg, name)) is not int:
            raise StatusMessageEncodingError(f"{name} must be an integer, got {getattr(msg, name)!r}")
    if not 0 <= msg.seq <= _MAX_SEQ:
        raise StatusMessageEncodingError(f"seq out of range: {msg.seq}")
    if msg.timestamp < 0:
        raise StatusMessageEncodingError(f"timestamp must be unsigned: {msg.timestamp}")
    if msg.state_code not in STATE_CODES.values():
        raise StatusMessageEncodingError(f"Invalid state code: {msg.state_code!r}")
    if msg.hr_code not in HR_CODES.values():
        raise StatusMessageEncodingError(f"Invalid heart-rate code: {msg.hr_code!r}")
    if msg.bpm < UNKNOWN_BPM:
        raise StatusMessageEncodingError(f"bpm must be {UNKNOWN_BPM} or non-negative: {msg.bpm}")
    if msg.speed < 0:
        raise StatusMessageEncodingError(f"speed must be unsigned: {msg.speed}")


def encode(msg: StatusMessage) -> bytes:
    _validate(msg)
    body = msg.body
    return body + f"{crc16_ccitt_false(body):04X}\n".encode("ascii")


def _parse_unsigned(name: str, text: bytes) -> int:
    if not _UNSIGNED_PATTERN.fullmatch(text):
        raise StatusMessageFormatError(f"{name} is not an unsigned decimal: {text!r}")
    return int(text)


def decode(line: bytes) -> StatusMessage:
    if line.endswith(b"\n"):
        line = line[:-1]
    if not line.startswith(MAGIC):
        raise StatusMessageFormatError(f"Bad magic: {line[:len(MAGIC)]!r}")
    if len(line) < len(MAGIC) + _CRC_TEXT_LENGTH:
        raise StatusMessageFormatError("Line is too short to hold a checksum")

    # The checksum is verified before any field is parsed, so that corruption anywhere in the payload is reported as
    # an integrity failure rather than a parse failure
    body, crc_text = line[:-_CRC_TEXT_LENGTH], line[-_CRC_TEXT_LENGTH:]
    if not _CRC_PATTERN.fullmatch(crc_text):
        raise StatusMessageFormatError(f"Malformed checksum field: {crc_text!r}")
    expected_crc = int(crc_text, 16)
    actual_crc = crc16_ccitt_false(body)
    if actual_crc != expected_crc:
        raise StatusMessageIntegrityError(
            f"Checksum mismatch: line says {expected_crc:04X}, body hashes to {actual_crc:04X}"
        )

    if not body.endswith(b","):
        raise StatusMessageFormatError("Missing separator before the checksum")
    fields = body[len(MAGIC) : -1].split(b",")
    if len(fields) != _FIELD_COUNT:
        raise StatusMessageFormatError(f"Expected {_FIELD_COUNT} fields, got {len(fields)}")
    seq_text, timestamp_text, state_text, hr_text, bpm_text, speed_text = fields

    seq = _parse_unsigned("seq", seq_text)
    if seq > _MAX_SEQ:
        raise StatusMessageFormatError(f"seq out of range: {seq}")
    state_code = state_text.decode("ascii", errors="replace")
    if state_code not in STATE_CODES.values():
        raise StatusMessageFormatError(f"Unknown state code: {state_text!r}")
    hr_code = hr_text.decode("ascii", errors="replace")
    if hr_code not in HR_CODES.values():
        raise StatusMessageFormatError(f"Unknown heart-rate code: {hr_text!r}")
    if not _BPM_PATTERN.fullmatch(bpm_text):
        raise StatusMessageFormatError(f"bpm is not a valid decimal: {bpm_text!r}")

    return StatusMessage(
        seq=seq,
        timestamp=_parse_unsigned("timestamp", timestamp_text),
        state_code=state_code,
        hr_code=hr_code,
        bpm=int(bpm_text),
        speed=_parse_unsigned("speed", speed_text),
    )


def encode_ack(seq: int) -> bytes:
    return f"ACK,{seq}\n".encode("ascii")


@dataclass
class ReceiveResult:
    accepted: list[StatusMessage] = field(default_factory=list)
    rejects: Counter[str] = field(default_factory=Counter)


class ControlRoomReceiver:
    """Single consumer of one status stream. Accepted lines are appended verbatim to the log and acknowledged."""

    _FORMAT_REJECT = "format"
    _INTEGRITY_REJECT = "integrity"

    def __init__(self, log_path: Path, ack_path: Path) -> None:
        self.log_path = log_path
        self.ack_path = ack_path
        self.result = ReceiveResult()
        with ExitStack() as stack:
            try:
                self._log_file: BinaryIO = stack.enter_context(open(log_path, "ab"))
                self._ack_file: BinaryIO = stack.enter_context(open(ack_path, "ab"))
            except OSError as e:
                raise TelemetryLogWriteError(f"Cannot open control room log: {e}") from e
            # Both files stay open until close()
            self._files = stack.pop_all()

    def __enter__(self) -> "ControlRoomReceiver":
        return self

    def __exit__(
        self,
        exc_type: Optional[Type[BaseException]],
        exc_val: Optional[BaseException],
        exc_tb: Optional[TracebackType],
    ) -> None:
        self.close()

    def receive(self, line: bytes) -> Optional[StatusMessage]:
        try:
            msg = decode(line)
        except StatusMessageIntegrityError as e:
            _logger.info(f"Control room rejected a corrupted status line: {e}")
            self.result.rejects[self._INTEGRITY_REJECT] += 1
            return None
        except StatusMessageFormatError as e:
            _logger.info(f"Control room rejected a malformed status line: {e}")
            self.result.rejects[self._FORMAT_REJECT] += 1
            return None

        try:
            self._log_file.write(encode(msg))
            self._log_file.flush()
            self._ack_file.write(encode_ack(msg.seq))
            self._ack_file.flush()
        except OSError as e:
            raise TelemetryLogWriteError(f"Cannot append to the control room log: {e}") from e
        _logger.info(f"Control room logged status #{msg.seq}: state {msg.state_code}, heart {msg.hr_code}")
        self.result.accepted.append(msg)
        return msg

    def close(self) -> None:
        self._files.close()


def receive_log(lines: Iterable[bytes], log_path: Path, ack_path: Path) -> ReceiveResult:
    with ControlRoomReceiver(log_path, ack_path) as receiver:
        for line in lines:
            receiver.receive(line)
        return receiver.result


def read_log(path: Path) -> list[StatusMessage]:
    return [decode(line) for line in path.read_bytes().splitlines(keepends=True)]
