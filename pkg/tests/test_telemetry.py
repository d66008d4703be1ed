import random
from dataclasses import replace
from pathlib import Path

import pytest

from vigil.telemetry import (
    HR_CODES,
    MAGIC,
    STATE_CODES,
    ControlRoomReceiver,
    StatusMessage,
    StatusMessageEncodingError,
    StatusMessageFormatError,
    StatusMessageIntegrityError,
    TelemetryLogWriteError,
    crc16_ccitt_false,
    decode,
    encode,
    read_log,
    receive_log,
)

_GOLDEN_MESSAGE = StatusMessage(seq=1, timestamp=1700000000, state_code="AS", hr_code="NP", bpm=-1, speed=0)
_GOLDEN_LINE = b"FTG1,1,1700000000,AS,NP,-1,0,6AF6\n"


def _bitwise_crc(data: bytes) -> int:
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x1021) if crc & 0x8000 else (crc << 1)
            crc &= 0xFFFF
    return crc


def _random_message(rng: random.Random) -> StatusMessage:
    return StatusMessage(
        seq=rng.randint(0, 2**32 - 1),
        timestamp=rng.randint(0, 2**40),
        state_code=rng.choice(list(STATE_CODES.values())),
        hr_code=rng.choice(list(HR_CODES.values())),
        bpm=rng.randint(-1, 300),
        speed=rng.randint(0, 5000),
    )


def test_crc_check_value():
    assert crc16_ccitt_false(b"123456789") == 0x29B1


def test_crc_matches_bitwise_oracle():
    rng = random.Random(1234)
    for _ in range(500):
        data = rng.randbytes(rng.randint(0, 64))
        assert crc16_ccitt_false(data) == _bitwise_crc(data)


def test_golden_line():
    assert encode(_GOLDEN_MESSAGE) == _GOLDEN_LINE
    assert decode(_GOLDEN_LINE) == _GOLDEN_MESSAGE


def test_decode_accepts_a_line_without_newline():
    assert decode(_GOLDEN_LINE.rstrip(b"\n")) == _GOLDEN_MESSAGE


@pytest.mark.fuzz
def test_encode_decode_fuzz():
    rng = random.Random(0xF7617)
    for _ in range(100_000):
        msg = _random_message(rng)
        assert decode(encode(msg)) == msg


@pytest.mark.fuzz
def test_every_single_byte_mutation_is_rejected():
    rng = random.Random(99)
    for _ in range(100):
        line = encode(_random_message(rng))
        body_end = len(line) - 5
        for position in range(len(line) - 1):
            for value in range(256):
                if value == line[position]:
                    continue
                mutated = line[:position] + bytes([value]) + line[position + 1 :]
                if len(MAGIC) <= position < body_end:
                    with pytest.raises(StatusMessageIntegrityError):
                        decode(mutated)
                else:
                    with pytest.raises((StatusMessageFormatError, StatusMessageIntegrityError)):
                        decode(mutated)


def test_flipped_payload_byte_is_an_integrity_error():
    mutated = bytearray(_GOLDEN_LINE)
    mutated[8] ^= 0x01
    with pytest.raises(StatusMessageIntegrityError):
        decode(bytes(mutated))


@pytest.mark.parametrize(
    "line",
    [
        b"",
        b"XTG1,1,1700000000,AS,NP,-1,0,6AF6\n",
        b"FTG1,12\n",
        b"FTG1,1,1700000000,AS,NP,-1,0,6af6\n",
    ],
)
def test_malformed_lines(line: bytes):
    with pytest.raises(StatusMessageFormatError):
        decode(line)


def test_well_checksummed_but_malformed_fields():
    body = b"FTG1,01,1700000000,AS,NP,-1,0,"
    with pytest.raises(StatusMessageFormatError):
        decode(body + f"{_bitwise_crc(body):04X}\n".encode())
    body = b"FTG1,1,1700000000,ZZ,NP,-1,0,"
    with pytest.raises(StatusMessageFormatError):
        decode(body + f"{_bitwise_crc(body):04X}\n".encode())
    body = b"FTG1,1,1700000000,AS,NP,-1,"
    with pytest.raises(StatusMessageFormatError):
        decode(body + f"{_bitwise_crc(body):04X}\n".encode())


@pytest.mark.parametrize(
    "overrides",
    [{"seq": -1}, {"seq": 2**32}, {"bpm": -2}, {"speed": -5}, {"state_code": "XX"}, {"hr_code": "??"}, {"bpm": 70.0}],
)
def test_encode_rejects_out_of_range_fields(overrides: dict):
    with pytest.raises(StatusMessageEncodingError):
        encode(replace(_GOLDEN_MESSAGE, **overrides))


def test_receiver_logs_only_valid_lines(tmp_path: Path):
    rng = random.Random(5)
    messages = [_random_message(rng) for _ in range(3)]
    lines = [encode(m) for m in messages]
    corrupted = bytearray(lines[1])
    corrupted[10] = ord("#") if corrupted[10] != ord("#") else ord("@")
    stream = [lines[0], bytes(corrupted), lines[1], lines[2]]

    result = receive_log(stream, tmp_path / "telemetry.log", tmp_path / "acks.log")

    assert result.accepted == messages
    assert dict(result.rejects) == {"integrity": 1}
    assert (tmp_path / "telemetry.log").read_bytes() == b"".join(lines)
    assert read_log(tmp_path / "telemetry.log") == messages
    assert (tmp_path / "acks.log").read_bytes() == b"".join(f"ACK,{m.seq}\n".encode() for m in messages)


def test_receiver_counts_format_rejects(tmp_path: Path):
    result = receive_log([b"hello\n", _GOLDEN_LINE], tmp_path / "telemetry.log", tmp_path / "acks.log")
    assert result.accepted == [_GOLDEN_MESSAGE]
    assert dict(result.rejects) == {"format": 1}


def test_receiver_appends_across_sessions(tmp_path: Path):
    log_path = tmp_path / "telemetry.log"
    receive_log([_GOLDEN_LINE], log_path, tmp_path / "acks.log")
    receive_log([_GOLDEN_LINE], log_path, tmp_path / "acks.log")
    assert read_log(log_path) == [_GOLDEN_MESSAGE, _GOLDEN_MESSAGE]


def test_receiver_closes_the_log_when_the_ack_file_cannot_open(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    opened = []

    def tracking_open(*args, **kwargs):
        f = open(*args, **kwargs)
        opened.append(f)
        return f

    monkeypatch.setattr("vigil.telemetry.open", tracking_open, raising=False)
    ack_dir = tmp_path / "acks"
    ack_dir.mkdir()
    with pytest.raises(TelemetryLogWriteError):
        ControlRoomReceiver(tmp_path / "telemetry.log", ack_dir)
    assert len(opened) == 1
    assert opened[0].closed


def test_receiver_logs_a_repeated_message_every_time(tmp_path: Path):
    result = receive_log([_GOLDEN_LINE, _GOLDEN_LINE], tmp_path / "telemetry.log", tmp_path / "acks.log")
    assert result.accepted == [_GOLDEN_MESSAGE, _GOLDEN_MESSAGE]
    assert (tmp_path / "acks.log").read_bytes() == b"ACK,1\nACK,1\n"
