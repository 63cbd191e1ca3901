#!/usr/bin/env python3
"""Writes the front-end fixture WAVs and their golden log-mel dumps.

The golden values come from this numpy implementation, which shares no
code with the C++ front-end: symmetric Hamming window, zero-padded real
FFT, HTK mel triangles, natural log with a floor.

Usage: python3 make_fixtures.py [out_dir]
"""

import sys
import wave
from pathlib import Path

import numpy as np

SR = 16000
WIN = 400
HOP = 160
NFFT = 1024
NMELS = 128
FMIN = 20.0
FMAX = SR / 2
FLOOR = 1e-10


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + f / 700.0)


def mel_filterbank():
    edges = np.linspace(hz_to_mel(FMIN), hz_to_mel(FMAX), NMELS + 2)
    bin_mels = hz_to_mel(np.arange(NFFT // 2 + 1) * SR / NFFT)
    lo, ce, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    up = (bin_mels[None, :] - lo) / (ce - lo)
    down = (hi - bin_mels[None, :]) / (hi - ce)
    return np.maximum(0.0, np.minimum(up, down))


def log_mel(x):
    n_frames = (len(x) - WIN) // HOP + 1
    window = np.hamming(WIN)
    fb = mel_filterbank()
    out = np.empty((n_frames, NMELS))
    for t in range(n_frames):
        frame = x[t * HOP : t * HOP + WIN] * window
        spec = np.fft.rfft(frame, n=NFFT)
        power = spec.real**2 + spec.imag**2
        out[t] = np.log(np.maximum(fb @ power, FLOOR))
    return out


def quantize(x):
    return np.clip(np.round(x * 32768.0), -32768, 32767).astype(np.int16)


def write_wav(path, pcm):
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(SR)
        w.writeframes(pcm.astype("<i2").tobytes())


def write_dump(path, values):
    t, c = values.shape
    with open(path, "w") as f:
        f.write(f"emoser-spec v1 {t} {c}\n")
        for row in values.astype(np.float32):
            f.write(" ".join(repr(float(v)) for v in row) + "\n")


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    n = SR  # one second
    t = np.arange(n) / SR
    f0, f1 = 100.0, 7000.0
    signals = {
        "silence": np.zeros(n),
        "tone_1khz": 0.5 * np.sin(2 * np.pi * 1000.0 * t),
        "chirp": 0.5 * np.sin(2 * np.pi * (f0 * t + 0.5 * (f1 - f0) * t**2)),
    }
    for name, sig in signals.items():
        pcm = quantize(sig)
        write_wav(out / f"{name}.wav", pcm)
        write_dump(out / f"{name}.golden.txt", log_mel(pcm.astype(np.float64) / 32768.0))


if __name__ == "__main__":
    main()
