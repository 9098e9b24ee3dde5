#!/usr/bin/env python3
"""Regenerates src/unicode_tables.cpp from the Python unicodedata database."""
import sys
import unicodedata

RANGES = [(0x00C0, 0x024F), (0x0370, 0x03FF), (0x0400, 0x04FF), (0x1E00, 0x1EFF)]


def main(out):
    base, lower = [], []
    for lo, hi in RANGES:
        for cp in range(lo, hi + 1):
            ch = chr(cp)
            lo_ch = ch.lower()
            if len(lo_ch) == 1 and lo_ch != ch:
                lower.append((cp, ord(lo_ch)))
            stripped = "".join(c for c in unicodedata.normalize("NFD", ch)
                               if not unicodedata.combining(c))
            if len(stripped) == 1 and stripped != ch:
                base.append((cp, ord(stripped)))
    with open(out, "w") as f:
        f.write("// Generated by tools/gen_unicode_tables.py. Do not edit.\n\n")
        f.write('#include "unicode_tables.hpp"\n\nnamespace topicdrift::detail {\n\n')
        for name, fn, rows in (("kLower", "lowercase_table", lower),
                               ("kBaseLetter", "base_letter_table", base)):
            f.write(f"constexpr CodepointPair {name}[] = {{\n")
            for a, b in rows:
                f.write(f"    {{0x{a:04X}, 0x{b:04X}}},\n")
            f.write("};\n\n")
            f.write(f"std::span<const CodepointPair> {fn}() {{ return {name}; }}\n\n")
        f.write("}  // namespace topicdrift::detail\n")
    print(len(lower), len(base))


if __name__ == "__main__":
    main(sys.argv[1])
