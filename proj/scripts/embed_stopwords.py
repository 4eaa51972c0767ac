#!/usr/bin/env python3
"""Regenerate include/webqe/smart_stopwords.hpp from data/smart_stopwords.txt.

Run from the repository root after editing the data file:
    python3 scripts/embed_stopwords.py
"""

import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
SRC = ROOT / "data" / "smart_stopwords.txt"
DST = ROOT / "include" / "webqe" / "smart_stopwords.hpp"

words = []
for line in SRC.read_text(encoding="utf-8").splitlines():
    line = line.strip()
    if line and not line.startswith("#"):
        words.append(line)
words.sort()

lines = []
lines.append("#pragma once")
lines.append("")
lines.append("// Generated by scripts/embed_stopwords.py from data/smart_stopwords.txt.")
lines.append("// Do not edit by hand.")
lines.append("")
lines.append("#include <array>")
lines.append("#include <string_view>")
lines.append("")
lines.append("namespace webqe {")
lines.append("")
lines.append(f"// The SMART English stoplist ({len(words)} words), sorted.")
lines.append(f"inline constexpr std::array<std::string_view, {len(words)}> smart_stopwords = {{")
row = []
for w in words:
    row.append(f'"{w}"')
    if len(row) == 6:
        lines.append("    " + ", ".join(row) + ",")
        row = []
if row:
    lines.append("    " + ", ".join(row) + ",")
lines.append("};")
lines.append("")
lines.append("}  // namespace webqe")
lines.append("")

DST.parent.mkdir(parents=True, exist_ok=True)
DST.write_text("\n".join(lines), encoding="utf-8")
print(f"wrote {DST} ({len(words)} words)")
