#!/usr/bin/env python3
"""Convert an XSum dump into the summit corpus format.

Accepts either a JSON Lines / JSON export with ``id``, ``document`` and
``summary`` fields, or a directory of original ``*.summary`` files
(``[SN]FIRST-SENTENCE[SN]`` / ``[SN]RESTBODY[SN]`` sections). An optional
split file (JSON with a list of ids under the split name) filters records.
"""

import argparse
import json
import pathlib
import re
import sys

SECTION = re.compile(r"\[SN\]([A-Z-]+)\[SN\]")


def read_summary_file(path):
    parts = SECTION.split(path.read_text(encoding="utf-8"))
    sections = {parts[i]: parts[i + 1].strip() for i in range(1, len(parts) - 1, 2)}
    body = " ".join(line.strip() for line in sections.get("RESTBODY", "").splitlines() if line.strip())
    return {"id": path.stem, "document": body, "summary": sections.get("FIRST-SENTENCE", "")}


def read_export(path):
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("["):
        yield from json.loads(text)
        return
    for line in text.splitlines():
        if line.strip():
            yield json.loads(line)


def records(source):
    if source.is_dir():
        for path in sorted(source.glob("*.summary")):
            yield read_summary_file(path)
    else:
        yield from read_export(source)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source", type=pathlib.Path, help="JSONL/JSON export or directory of .summary files")
    ap.add_argument("output", type=pathlib.Path)
    ap.add_argument("--split-file", type=pathlib.Path, help="JSON mapping split names to id lists")
    ap.add_argument("--split", default="test")
    args = ap.parse_args(argv)

    keep = None
    if args.split_file:
        keep = set(map(str, json.loads(args.split_file.read_text(encoding="utf-8"))[args.split]))

    written = skipped = 0
    with args.output.open("w", encoding="utf-8") as out:
        out.write(json.dumps({"format": "summit-corpus", "version": 1}) + "\n")
        for rec in records(args.source):
            rid = str(rec.get("id", written + skipped))
            if keep is not None and rid not in keep:
                continue
            doc = " ".join(str(rec.get("document", "")).split())
            summary = " ".join(str(rec.get("summary", "")).split())
            if not doc or not summary:
                skipped += 1
                continue
            row = {"id": rid, "document": doc, "summaries": [summary], "topics": []}
            out.write(json.dumps(row, ensure_ascii=False) + "\n")
            written += 1
    print(f"wrote {written} records, skipped {skipped} empty", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
