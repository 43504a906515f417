"""Checks that every .svg under the given directories is well-formed SVG 1.1."""

import pathlib
import sys
import xml.etree.ElementTree as ET

SVG_NS = "{http://www.w3.org/2000/svg}"
ALLOWED = {"svg", "title", "rect", "circle", "line", "path", "text", "g"}


def check(path):
    root = ET.parse(path).getroot()
    if root.tag != SVG_NS + "svg":
        return f"{path}: root element is {root.tag}"
    if root.get("version") != "1.1":
        return f"{path}: missing version=1.1"
    for el in root.iter():
        if not el.tag.startswith(SVG_NS) or el.tag[len(SVG_NS):] not in ALLOWED:
            return f"{path}: unexpected element {el.tag}"
    return None


def main(dirs):
    files = [p for d in dirs for p in sorted(pathlib.Path(d).glob("*.svg"))]
    if not files:
        print("no svg files found")
        return 1
    errors = [e for e in map(check, files) if e]
    for e in errors:
        print(e)
    print(f"{len(files) - len(errors)}/{len(files)} svg files well-formed")
    return 1 if errors else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
