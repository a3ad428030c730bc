#!/usr/bin/env python3
"""Regenerates the toy corpus: sentences, recordings, MCD pairs and ratings.

Output is deterministic; rerunning overwrites the files in this directory.
"""

import math
import random
import struct
import wave
from pathlib import Path

HERE = Path(__file__).resolve().parent

NOUNS = [
    "भारत", "देश", "किताब", "पानी", "घर", "बच्चा", "स्कूल", "शहर", "गाँव", "नदी",
    "पहाड़", "सड़क", "बाज़ार", "किसान", "खेत", "मौसम", "बारिश", "सूरज", "चाँद", "आसमान",
    "दोस्त", "परिवार", "माता", "पिता", "भाई", "बहन", "शिक्षक", "डॉक्टर", "अस्पताल", "दुकान",
    "रेलगाड़ी", "स्टेशन", "संगीत", "कहानी", "अख़बार", "समाचार", "भाषा", "विद्यालय", "पुस्तकालय", "त्योहार",
    "मिठाई", "फूल", "पेड़", "जंगल", "हाथी", "शेर", "मोर", "गाय", "दूध", "रोटी",
    "क्षेत्र", "ज्ञान", "विज्ञान", "प्रकृति", "संस्कृति", "इतिहास", "राष्ट्र", "श्रमिक", "छात्र", "पत्र",
]
ADJECTIVES = [
    "सुंदर", "बड़ा", "छोटा", "नया", "पुराना", "अच्छा", "ठंडा", "गरम", "लंबा", "मीठा",
    "हरा", "नीला", "शांत", "तेज़", "प्रसिद्ध", "स्वच्छ", "ऊँचा", "गहरा",
]
VERBS = [
    "है", "था", "जाता है", "आता है", "खेलता है", "पढ़ता है", "लिखता है", "देखता है",
    "सुनता है", "बोलता है", "चलता है", "रहता है", "बनाता है", "खाता है", "गाता है",
]
LINKS = ["और", "में", "से", "पर", "के", "की", "का", "को", "लिए", "साथ", "बहुत", "भी", "हमेशा", "आज", "कल"]


def sentence(rng, n_words):
    words = []
    while len(words) < n_words - 1:
        pick = rng.random()
        if pick < 0.45:
            words.append(rng.choice(NOUNS))
        elif pick < 0.65:
            words.append(rng.choice(ADJECTIVES))
        else:
            words.append(rng.choice(LINKS))
    words.append(rng.choice(VERBS).split()[0])
    text = " ".join(words)
    if rng.random() < 0.3:
        cut = rng.randrange(1, len(words))
        text = " ".join(words[:cut]) + ", " + " ".join(words[cut:])
    return text + rng.choice(["।", "।", "."])


def write_text(rng):
    lines = []
    for i in range(1, 201):
        n = rng.randint(5, 13)
        if i % 37 == 0:
            n = 3
        if i % 41 == 0:
            n = 18
        text = sentence(rng, n)
        if i % 53 == 0:
            text = text.replace(" ", " 15 ", 1)
        if i % 59 == 0:
            text = text.replace(" ", " ok ", 1)
        if i % 23 == 0:
            text = text.rstrip("।.") + "!"
        lines.append(f"t{i:03d}\t{text}")
    (HERE / "raw.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def speechlike(rate, seconds, f0, amp, seed):
    """Harmonic signal with a syllable-rate envelope."""
    rng = random.Random(seed)
    phases = [rng.uniform(0, 2 * math.pi) for _ in range(8)]
    n = round(rate * seconds)
    out = []
    for i in range(n):
        t = i / rate
        env = 0.6 + 0.4 * math.sin(2 * math.pi * 4.0 * t)
        s = sum(math.sin(2 * math.pi * f0 * (h + 1) * t + phases[h]) / (h + 1) for h in range(8))
        out.append(amp * env * s / 2.0)
    return out


def silence(rate, seconds):
    return [0.0] * round(rate * seconds)


def write_wav(name, rate, samples, clip=True):
    frames = bytearray()
    for s in samples:
        if clip:
            s = max(-1.0, min(1.0, s))
        frames += struct.pack("<h", max(-32768, min(32767, round(s * 32767))))
    with wave.open(str(HERE / "wav" / name), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(bytes(frames))


def write_audio():
    (HERE / "wav").mkdir(exist_ok=True)
    r = 48_000
    write_wav("u1.wav", r, silence(r, 0.3) + speechlike(r, 2.0, 140.0, 0.5, 1) + silence(r, 0.3))
    write_wav("u2.wav", r, silence(r, 0.2) + speechlike(r, 1.0, 180.0, 0.4, 2) + silence(r, 0.4)
              + speechlike(r, 1.0, 180.0, 0.4, 3) + silence(r, 0.2))
    write_wav("u3.wav", r, silence(r, 0.2) + speechlike(r, 1.0, 120.0, 0.5, 4) + silence(r, 0.2))
    write_wav("u4.wav", 44_100, silence(44_100, 0.3) + speechlike(44_100, 2.0, 150.0, 0.5, 5)
              + silence(44_100, 0.3))
    write_wav("u5.wav", r, silence(r, 0.3) + speechlike(r, 2.0, 130.0, 1.6, 6) + silence(r, 0.3))
    write_wav("syn1.wav", r, silence(r, 0.1) + speechlike(r, 2.1, 145.0, 0.3, 1) + silence(r, 0.2))
    write_wav("syn2.wav", r, silence(r, 0.1) + speechlike(r, 1.9, 175.0, 0.5, 7) + silence(r, 0.1))


def write_ratings(rng):
    rows = ["evaluator,system,item,condition,score"]
    # Female set: ground truth rated high, synthesized a little lower.
    for e in range(1, 6):
        for item in range(1, 5):
            rows.append(f"e{e:02d},hi-female,f{item},ground-truth,{rng.choice([4, 5, 5])}")
            rows.append(f"e{e:02d},hi-female,f{item},synthesized,{rng.choice([3, 4, 4, 5])}")
    # Male set: most evaluators prefer the synthesized audio.
    for e in range(1, 6):
        for item in range(1, 5):
            rows.append(f"e{e:02d},hi-male,m{item},ground-truth,{rng.choice([3, 4])}")
            rows.append(f"e{e:02d},hi-male,m{item},synthesized,{rng.choice([4, 4, 5])}")
    (HERE / "ratings.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")


if __name__ == "__main__":
    write_text(random.Random(20240601))
    write_audio()
    write_ratings(random.Random(7))
