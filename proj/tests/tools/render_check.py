#!/usr/bin/env python3
"""Independent renderer check for signed PDFs.

Every page of each file is rasterized and its text extracted with PDFium
(the Chromium engine) and with MuPDF. A file passes when both engines open
it, render every page and find the expected banner text on every page.
PDFium must report no error at all. MuPDF notices (it logs a repair notice
when startxref lies further than 1 KiB from the end of the file) are
printed but do not fail the check.

Usage: render_check.py [--expect TEXT] FILE...
Prints "OK <file> pages=<n> [mupdf-notices=...]" or "FAIL <file>: <why>"
per file and exits non-zero if any file fails.
"""

import argparse
import sys

import pymupdf
import pypdfium2 as pdfium


def check_pdfium(path, expect):
    doc = pdfium.PdfDocument(path)
    try:
        if len(doc) == 0:
            raise RuntimeError("no pages")
        for i in range(len(doc)):
            page = doc[i]
            bitmap = page.render(scale=0.5)
            if bitmap.width == 0 or bitmap.height == 0:
                raise RuntimeError(f"page {i + 1} rendered empty")
            text = page.get_textpage().get_text_range()
            if expect and expect not in text:
                raise RuntimeError(f"banner missing on page {i + 1}")
        return len(doc)
    finally:
        doc.close()


def check_mupdf(path, expect):
    pymupdf.TOOLS.reset_mupdf_warnings()
    doc = pymupdf.open(path)
    for page in doc:
        pix = page.get_pixmap(dpi=36)
        if pix.width == 0 or pix.height == 0:
            raise RuntimeError(f"page {page.number + 1} rendered empty")
        if expect and expect not in page.get_text():
            raise RuntimeError(f"banner missing on page {page.number + 1}")
    n = doc.page_count
    doc.close()
    return n, pymupdf.TOOLS.mupdf_warnings().replace("\n", "; ")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--expect", default="")
    ap.add_argument("files", nargs="+")
    args = ap.parse_args()
    pymupdf.TOOLS.mupdf_display_errors(False)
    failed = 0
    for f in args.files:
        try:
            pages = check_pdfium(f, args.expect)
        except Exception as e:  # any PDFium failure is a render failure
            failed += 1
            print(f"FAIL {f}: pdfium: {e}")
            continue
        try:
            mupdf_pages, notices = check_mupdf(f, args.expect)
        except Exception as e:
            failed += 1
            print(f"FAIL {f}: mupdf: {e}")
            continue
        if mupdf_pages != pages:
            failed += 1
            print(f"FAIL {f}: page count differs ({pages} vs {mupdf_pages})")
            continue
        extra = f" mupdf-notices={notices}" if notices else ""
        print(f"OK {f} pages={pages}{extra}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
