"""Declarative scenario files: the batch front end's input format.

Line-oriented, versioned, diffable.  A scenario names curves (raw weight
vectors or word-images of earlier curves), words, a marking, sequences and
samples; blank lines and #-comments are ignored.

    version 1
    surface genus=1 punctures=2
    curve alpha raw 0,1,1,1,0,0
    word psi = D[u]^{1} D[v]^{-1}
    word spiral = D[gamma]^{n} (psi)^{n}
    curve seeded from alpha word D[gamma]^{3}
    marking mu base alpha,m2 transversals alpha:t1,m2:t2
    sequence rho plus c01 word spiral minus a word id
    samples 4,6,8,12,16,24,32,48
    test_curves alpha,gamma
    threshold band 8
    threshold residual 1/10
    witness collar gamma
    witness piece alpha 0
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .asymptotics import ClassifierConfig, SequenceSpec
from .curves import (
    AffineExpr,
    BlockLetter,
    Marking,
    MappingClassWord,
    Multicurve,
    TwistLetter,
    apply_word,
)
from .kernel import Surface, build_canonical_triangulation
from .metrics import SubsurfaceSpec


class ScenarioError(Exception):
    def __init__(self, message, line_no=None, column=None):
        loc = ""
        if line_no is not None:
            loc = f" (line {line_no}" + (f", col {column}" if column else "") + ")"
        super().__init__(message + loc)
        self.line_no = line_no
        self.column = column


_AFFINE = re.compile(r"^(?:(-?\d*)n)?([+-]?\d+)?$")


def parse_affine(text: str, line_no=None) -> AffineExpr:
    text = text.strip()
    if not text:
        raise ScenarioError("empty exponent", line_no)
    m = _AFFINE.match(text.replace(" ", ""))
    if not m or (m.group(1) is None and m.group(2) is None):
        raise ScenarioError(f"bad affine exponent {text!r}", line_no)
    a_raw, b_raw = m.group(1), m.group(2)
    if a_raw is None:
        a = 0
    elif a_raw in ("", "+"):
        a = 1
    elif a_raw == "-":
        a = -1
    else:
        a = int(a_raw)
    b = int(b_raw) if b_raw else 0
    return AffineExpr(a, b)


class WordParser:
    """Recursive-descent parser for twist words."""

    token_re = re.compile(r"D\[([A-Za-z_][\w.]*)\]\^\{([^}]*)\}|\(|\)\^\{([^}]*)\}|\s+")

    def __init__(self, text, curves, words, line_no):
        self.text = text
        self.curves = curves
        self.words = words
        self.line_no = line_no
        self.pos = 0

    def parse(self) -> MappingClassWord:
        letters = self._sequence(depth=0)
        if self.pos < len(self.text):
            raise ScenarioError(
                f"unexpected input {self.text[self.pos:]!r}",
                self.line_no,
                self.pos + 1,
            )
        return MappingClassWord(tuple(letters))

    def _sequence(self, depth):
        letters = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isspace():
                self.pos += 1
                continue
            if ch == ")":
                if depth == 0:
                    raise ScenarioError("unbalanced ')'", self.line_no, self.pos + 1)
                return letters
            m = re.match(r"D\[([A-Za-z_][\w.]*)\]\^\{([^}]*)\}", self.text[self.pos:])
            if m:
                name, expo = m.group(1), m.group(2)
                if name not in self.curves:
                    raise ScenarioError(
                        f"unknown curve {name!r} in word", self.line_no, self.pos + 1
                    )
                letters.append(
                    TwistLetter(
                        self.curves[name].coords,
                        parse_affine(expo, self.line_no),
                        name=name,
                    )
                )
                self.pos += m.end()
                continue
            m = re.match(r"\(([A-Za-z_][\w.]*)\)\^\{([^}]*)\}", self.text[self.pos:])
            if m:
                name, expo = m.group(1), m.group(2)
                if name not in self.words:
                    raise ScenarioError(
                        f"unknown word {name!r}", self.line_no, self.pos + 1
                    )
                letters.append(
                    BlockLetter(self.words[name], parse_affine(expo, self.line_no))
                )
                self.pos += m.end()
                continue
            if ch == "(":
                self.pos += 1
                inner = self._sequence(depth + 1)
                if self.pos >= len(self.text) or self.text[self.pos] != ")":
                    raise ScenarioError("unbalanced '('", self.line_no, self.pos + 1)
                self.pos += 1
                m = re.match(r"\^\{([^}]*)\}", self.text[self.pos:])
                if not m:
                    raise ScenarioError(
                        "group needs an exponent", self.line_no, self.pos + 1
                    )
                letters.append(
                    BlockLetter(
                        MappingClassWord(tuple(inner)),
                        parse_affine(m.group(1), self.line_no),
                    )
                )
                self.pos += m.end()
                continue
            raise ScenarioError(
                f"cannot parse word at {self.text[self.pos:]!r}",
                self.line_no,
                self.pos + 1,
            )
        if depth:
            raise ScenarioError("unbalanced '('", self.line_no)
        return letters


@dataclass
class Scenario:
    name: str
    surface: Surface
    tri: object
    curves: dict
    words: dict
    marking: Marking
    sequences: list  # (name, SequenceSpec)
    test_curves: list  # (name, Multicurve) or []
    config: ClassifierConfig
    witnesses: list
    source_text: str


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    surface = None
    tri = None
    curves = {}
    words = {"id": MappingClassWord(())}
    marking = None
    sequences = []
    seq_raw = []
    samples = None
    test_names = None
    band = 8
    residual = Fraction(1, 10)
    witnesses_raw = []
    version_seen = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "version":
                if parts[1] != "1":
                    raise ScenarioError(f"unsupported version {parts[1]}", line_no)
                version_seen = True
            elif head == "surface":
                kv = dict(p.split("=") for p in parts[1:])
                surface = Surface(int(kv["genus"]), int(kv["punctures"]))
                tri = build_canonical_triangulation(surface)
            elif head == "curve":
                if tri is None:
                    raise ScenarioError("curve before surface", line_no)
                cname = parts[1]
                if parts[2] == "raw":
                    weights = tuple(int(x) for x in parts[3].split(","))
                    curves[cname] = Multicurve(tri, weights)
                elif parts[2] == "from":
                    base = parts[3]
                    if base not in curves:
                        raise ScenarioError(f"unknown curve {base!r}", line_no)
                    if parts[4] != "word":
                        raise ScenarioError("expected 'word'", line_no)
                    wtext = line.split(" word ", 1)[1]
                    word = WordParser(wtext, curves, words, line_no).parse()
                    curves[cname] = apply_word(word, 0, curves[base])
                else:
                    raise ScenarioError("curve needs 'raw' or 'from'", line_no)
            elif head == "word":
                wname = parts[1]
                if parts[2] != "=":
                    raise ScenarioError("expected '='", line_no)
                wtext = line.split("=", 1)[1]
                words[wname] = WordParser(wtext, curves, words, line_no).parse()
            elif head == "marking":
                base_names = parts[3].split(",")
                trans_field = parts[5] if len(parts) > 5 else ""
                base = curves[base_names[0]]
                for bn in base_names[1:]:
                    base = base.union(curves[bn])
                comps = base.component_curves()
                trans = []
                for pair in trans_field.split(","):
                    if not pair:
                        continue
                    bn, tn = pair.split(":")
                    target = curves[bn]
                    idx = next(
                        i for i, c in enumerate(comps) if c.coords == target.coords
                    )
                    trans.append((idx, curves[tn]))
                marking = Marking(base, tuple(trans))
            elif head == "sequence":
                m = re.match(
                    r"sequence\s+(\w+)\s+plus\s+(\w+)\s+word\s+(.*?)\s+minus\s+(\w+)\s+word\s+(.*)$",
                    line,
                )
                if not m:
                    raise ScenarioError("bad sequence syntax", line_no)
                seq_raw.append((m.group(1), m.group(2), m.group(3), m.group(4), m.group(5), line_no))
            elif head == "samples":
                samples = tuple(int(x) for x in parts[1].split(","))
            elif head == "test_curves":
                test_names = parts[1].split(",")
            elif head == "threshold":
                if parts[1] == "band":
                    band = int(parts[2])
                elif parts[1] == "residual":
                    residual = Fraction(parts[2])
                else:
                    raise ScenarioError(f"unknown threshold {parts[1]!r}", line_no)
            elif head == "witness":
                witnesses_raw.append((parts[1:], line_no))
            else:
                raise ScenarioError(f"unknown directive {head!r}", line_no)
        except ScenarioError:
            raise
        except Exception as exc:
            raise ScenarioError(f"{type(exc).__name__}: {exc}", line_no) from exc

    if not version_seen:
        raise ScenarioError("missing 'version 1' header")
    if surface is None:
        raise ScenarioError("missing surface")
    if marking is None:
        raise ScenarioError("missing marking")
    if samples is None:
        raise ScenarioError("missing samples")

    def parse_word_ref(wtext, line_no):
        wtext = wtext.strip()
        if wtext in words:
            return words[wtext]
        return WordParser(wtext, curves, words, line_no).parse()

    for (sname, plus, ptext, minus, mtext, line_no) in seq_raw:
        for nm in (plus, minus):
            if nm not in curves:
                raise ScenarioError(f"unknown seed curve {nm!r}", line_no)
        sequences.append(
            (
                sname,
                SequenceSpec(
                    plus_seed=curves[plus],
                    plus_word=parse_word_ref(ptext, line_no),
                    minus_seed=curves[minus],
                    minus_word=parse_word_ref(mtext, line_no),
                    sample_set=samples,
                ),
            )
        )
    if not sequences:
        raise ScenarioError("missing sequence")

    test_curves = []
    if test_names:
        for nm in test_names:
            if nm not in curves:
                raise ScenarioError(f"unknown test curve {nm!r}")
            test_curves.append((nm, curves[nm]))

    witnesses = []
    for spec, line_no in witnesses_raw:
        if spec[0] == "collar":
            witnesses.append(SubsurfaceSpec.annular(curves[spec[1]]))
        elif spec[0] == "piece":
            witnesses.append(
                SubsurfaceSpec.complement_piece(curves[spec[1]], int(spec[2]))
            )
        else:
            raise ScenarioError(f"unknown witness kind {spec[0]!r}", line_no)

    return Scenario(
        name=name,
        surface=surface,
        tri=tri,
        curves=curves,
        words=words,
        marking=marking,
        sequences=sequences,
        test_curves=test_curves,
        config=ClassifierConfig(band=band, residual=residual),
        witnesses=witnesses,
        source_text=text,
    )
