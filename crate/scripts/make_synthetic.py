#!/usr/bin/env python3
"""Regenerate the generator-defined benchmark datasets under data/.

mux6, threeOf9, xd6, parity5_plus_5, led7 and monks-problems-2 are fully
determined by a boolean concept (plus, for led7, a noise model). The files are
written as ARFF with nominal attributes. Sampling uses Python's `random` with
fixed seeds so the output is byte-stable.
"""
import itertools
import os
import random
import sys

OUT = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data")


def write_arff(name, attrs, rows, comment):
    path = os.path.join(OUT, f"{name}.arff")
    with open(path, "w", newline="\n") as f:
        for line in comment.strip().splitlines():
            f.write(f"% {line}\n")
        f.write(f"@relation {name}\n\n")
        for attr, dom in attrs:
            f.write(f"@attribute {attr} {{{','.join(dom)}}}\n")
        f.write("\n@data\n")
        for r in rows:
            f.write(",".join(str(v) for v in r) + "\n")
    print(f"wrote {path}: {len(rows)} rows")


def bits(n):
    return list(itertools.product((0, 1), repeat=n))


def mux6():
    rows = []
    for b in bits(6):
        addr = b[0] * 2 + b[1]
        rows.append(list(b) + [b[2 + addr]])
    # two copies of the complete truth table (128 rows)
    rows = rows + rows
    attrs = [(f"A{i}", ["0", "1"]) for i in range(2)] + [(f"D{i}", ["0", "1"]) for i in range(4)]
    write_arff("mux6", attrs + [("class", ["0", "1"])], rows,
               "6-bit multiplexer: class = D[A0*2+A1]. Complete truth table, listed twice.")


def three_of_9():
    rows = []
    for b in bits(9):
        s = "".join(map(str, b))
        rows.append(list(b) + [1 if "111" in s else 0])
    attrs = [(f"A{i}", ["0", "1"]) for i in range(1, 10)]
    write_arff("threeOf9", attrs + [("class", ["0", "1"])], rows,
               "class = 1 iff three consecutive bits are 1. Complete truth table (512 rows).")


def xd6():
    rng = random.Random(6)
    rows = []
    for _ in range(973):
        b = [rng.randint(0, 1) for _ in range(9)]
        c = int(all(b[0:3]) or all(b[3:6]) or all(b[6:9]))
        rows.append(b + [c])
    attrs = [(f"A{i}", ["0", "1"]) for i in range(1, 10)]
    write_arff("xd6", attrs + [("class", ["0", "1"])], rows,
               "class = (A1&A2&A3) | (A4&A5&A6) | (A7&A8&A9). 973 uniform samples, seed 6.")


def parity5_plus_5():
    rng = random.Random(5)
    table = bits(10)
    extra = [table[rng.randrange(len(table))] for _ in range(100)]
    rows = [list(b) + [sum(b[:5]) % 2] for b in table + extra]
    attrs = [(f"Bit_{i}", ["0", "1"]) for i in range(1, 11)]
    write_arff("parity5_plus_5", attrs + [("class", ["0", "1"])], rows,
               "class = parity of Bit_1..Bit_5; Bit_6..Bit_10 irrelevant.\n"
               "Complete 1024-row truth table plus 100 uniform extra rows (seed 5).")


LED = [
    "1110111", "0010010", "1011101", "1011011", "0111010",
    "1101011", "1101111", "1010010", "1111111", "1111011",
]


def led7():
    rng = random.Random(7)
    rows = []
    for _ in range(3200):
        digit = rng.randrange(10)
        seg = [int(c) ^ (1 if rng.random() < 0.1 else 0) for c in LED[digit]]
        rows.append(seg + [digit])
    attrs = [(f"V{i}", ["0", "1"]) for i in range(1, 8)]
    write_arff("led7", attrs + [("class", [str(d) for d in range(10)])], rows,
               "Seven-segment LED digits, each segment inverted with probability 0.1.\n"
               "3200 samples, seed 7.")


def monks2():
    doms = [3, 3, 2, 3, 4, 2]
    full = [list(v) for v in itertools.product(*[range(1, d + 1) for d in doms])]
    label = lambda r: int(sum(v == 1 for v in r) == 2)
    rng = random.Random(2)
    train = rng.sample(full, 169)
    rows = [r + [label(r)] for r in train + full]
    attrs = [(f"attr#{i + 1}", [str(v) for v in range(1, d + 1)]) for i, d in enumerate(doms)]
    write_arff("monks-problems-2", attrs + [("class", ["0", "1"])], rows,
               "MONK's problem 2: class = 1 iff exactly two attributes take their first value.\n"
               "169 sampled rows (seed 2) followed by the complete 432-row attribute space.")


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    mux6()
    three_of_9()
    xd6()
    parity5_plus_5()
    led7()
    monks2()
