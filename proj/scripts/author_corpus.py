#!/usr/bin/env python3
"""Writes the labeled corpus under corpus/cases/.

Every span and line/column label is computed here by plain substring search
over the authored source text, independently of the C++ parser, so the
files this script emits can serve as an oracle for it.

Each case also gets scripted model responses in script/*.txt. They are
turned into replay fixtures by tools/record_fixtures, which renders the real
prompts and stores the responses under their prompt hash.
"""

from __future__ import annotations

import json
import shutil
from dataclasses import dataclass, field
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
CASES_DIR = ROOT / "corpus" / "cases"


@dataclass
class Seed:
    rule_id: str
    criterion: str
    snippet: str            # verbatim text of the offending region
    description: str
    fix_description: str
    fixed_code: str          # fixed version of `quoted`
    quote: str | None = None  # what a response cites as offending code
    occurrence: int = 0

    @property
    def quoted(self) -> str:
        return self.quote if self.quote is not None else self.snippet


@dataclass
class Expect:
    rule_id: str
    anchor: str             # text the diagnostic span starts with
    occurrence: int = 0


@dataclass
class Case:
    id: str
    ext: str
    source: str
    seeds: list[Seed] = field(default_factory=list)
    expect: list[Expect] = field(default_factory=list)
    selection: str | None = None   # verbatim selected text; whole file if None
    detect: str = "perfect"        # response style for the detect stage
    chain: str = "perfect"         # response style for the chain fix stage
    fix: str = "perfect"           # response style for the fix prompt
    raw: dict[str, str] = field(default_factory=dict)  # hand-written responses

    @property
    def clean(self) -> bool:
        return not self.seeds


def find(text: str, needle: str, occurrence: int = 0) -> int:
    pos = -1
    for _ in range(occurrence + 1):
        pos = text.find(needle, pos + 1)
        if pos < 0:
            raise ValueError(f"{needle!r} (occurrence {occurrence}) not found")
    return pos


def line_col(text: str, offset: int) -> tuple[int, int]:
    data = text.encode("utf-8")
    prefix = data[:offset]
    line = prefix.count(b"\n") + 1
    col = offset - (prefix.rfind(b"\n") + 1)
    return line, col


def byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


def normalize_ws(s: str) -> str:
    return " ".join(s.split())


# ---- response rendering -----------------------------------------------------

ITALIAN = {
    "error_description": "descrizione_errore",
    "offending_code": "codice_generatore",
    "fix_description": "descrizione_risoluzione",
    "fixed_code": "codice_fix",
    "criterion": "criterio",
}


def finding(seed: Seed) -> dict:
    return {
        "error_description": seed.description,
        "offending_code": seed.quoted,
        "criterion": seed.criterion,
    }


def fix_entry(seed: Seed, with_criterion: bool) -> dict:
    entry = {
        "error_description": seed.description,
        "offending_code": seed.quoted,
    }
    if with_criterion:
        entry["criterion"] = seed.criterion
    entry["fix_description"] = seed.fix_description
    entry["fixed_code"] = seed.fixed_code
    return entry


def italianize(records: list[dict]) -> list[dict]:
    return [{ITALIAN.get(k, k): v for k, v in r.items()} for r in records]


def dump(records) -> str:
    return json.dumps(records, indent=2, ensure_ascii=False)


def wrap(payload: str, style: str) -> str:
    if "fenced" in style:
        payload = "```json\n" + payload + "\n```"
    if "prose" in style:
        payload = ("Here is the analysis of the code you provided.\n\n" + payload +
                   "\n\nLet me know if you need anything else.")
    return payload


IRRELEVANT = {
    "error_description": "The component should use a CSS module instead of a global stylesheet.",
    "offending_code": "import './styles.css';",
    "criterion": "1.4.3",
}


def detect_records(case: Case) -> list[dict]:
    style = case.detect
    seeds = list(case.seeds)
    if "miss-one" in style and seeds:
        seeds = seeds[:-1]
    records = [finding(s) for s in seeds]
    if "wrong-criterion" in style and records:
        records[0]["criterion"] = "1.4.11"
    if "no-criterion" in style and records:
        del records[-1]["criterion"]
    if "duplicate" in style and records:
        records.insert(1, dict(records[0]))
    if "irrelevant" in style:
        records.append(dict(IRRELEVANT))
    if "false-positive" in style:
        records.append({
            "error_description": "The button has no accessible name.",
            "offending_code": case.source.strip().splitlines()[0],
            "criterion": "4.1.2",
        })
    return records


def unique_records(records: list[dict]) -> list[dict]:
    # Only exact repeats are authored, so exact comparison mirrors the
    # engine's similarity rule on this corpus.
    seen, out = set(), []
    for r in records:
        key = (r.get("criterion", ""), normalize_ws(r.get("offending_code", "")))
        if key in seen:
            continue
        seen.add(key)
        out.append(r)
    return out


def seed_for(case: Case, record: dict) -> Seed | None:
    for s in case.seeds:
        if s.quoted == record.get("offending_code") and s.criterion == record.get("criterion"):
            return s
    for s in case.seeds:
        if s.quoted == record.get("offending_code"):
            return s
    return None


def chain_records(case: Case, findings: list[dict]) -> list[dict]:
    out = []
    for r in findings:
        seed = seed_for(case, r)
        entry = dict(r)
        if seed is None:
            entry["fix_description"] = "Move the styles into a CSS module."
            entry["fixed_code"] = "import styles from './styles.module.css';"
        else:
            entry["fix_description"] = seed.fix_description
            entry["fixed_code"] = seed.fixed_code
        out.append(entry)
    style = case.chain
    if "drop-code" in style and out:
        out[0]["fixed_code"] = "<div />"
    if "syntax-break" in style and out:
        out[0]["fixed_code"] = out[0]["fixed_code"].replace(">", "", 1) + " {"
    if "missing-fix" in style and out:
        out[-1]["fixed_code"] = ""
    return out


def fix_records(case: Case, diagnosed: list[Seed]) -> list[dict]:
    records = [fix_entry(s, with_criterion=False) for s in diagnosed]
    style = case.fix
    if "extra-field" in style and records:
        records[0]["severity"] = "high"
    if "drop-code" in style and records:
        records[0]["fixed_code"] = "<div />"
    if "new-issue" in style and records:
        records[0]["fixed_code"] = records[0]["fixed_code"].replace(
            ">", ' aria-hidden="true" aria-label="hidden control">', 1)
    if "no-offending" in style and records:
        del records[0]["offending_code"]
    return records


VERBOSE = ("Accessibility is a broad topic and there are many aspects to consider when "
           "building inclusive interfaces. ") * 60


def render_stage(records: list[dict], style: str, schema_fields: list[str]) -> str:
    if "invalid-readable" in style:
        chunks = []
        for r in records:
            chunks.append("\n".join(f"{k}: {r.get(k, '')}" for k in schema_fields))
        return "I could not produce JSON, here are the results.\n\n" + "\n\n".join(chunks) + "\n"
    if "invalid-verbose" in style:
        return VERBOSE
    if "italian" in style:
        records = italianize(records)
    return wrap(dump(records), style)


DETECT_FIELDS = ["error_description", "offending_code", "criterion"]
CHAIN_FIELDS = ["error_description", "offending_code", "criterion", "fix_description", "fixed_code"]
FIX_FIELDS = ["error_description", "offending_code", "fix_description", "fixed_code"]


# ---- cases ------------------------------------------------------------------

TOOLTIP = """import React, { useState } from 'react';
import './Tooltip.css';

const Tooltip = ({ text, children }) => {
  const [isVisible, setIsVisible] = useState(false);

  const handleMouseOver = () => {
    setIsVisible(!isVisible);
  };

  return (
    <div className="tooltip-container">
      <div className="tooltip-trigger" onClick={handleMouseOver}>{children}</div>
      <div className={`tooltip-text ${isVisible ? 'visible' : ''}`}>{text}</div>
    </div>
  );
};

export default Tooltip;
"""

TRIGGER = '<div className="tooltip-trigger" onClick={handleMouseOver}>{children}</div>'
TRIGGER_OPEN = '<div className="tooltip-trigger" onClick={handleMouseOver}>'
TIP = "<div className={`tooltip-text ${isVisible ? 'visible' : ''}`}>{text}</div>"
TOOLTIP_SELECTION = TOOLTIP[TOOLTIP.index('<div className="tooltip-container">'):TOOLTIP.index("    </div>\n  );") + len("    </div>")]

# Response to the fix prompt, as the prototype returned it: Italian keys,
# two alternative fixes for the flagged trigger.
TOOLTIP_FIX = dump([
    {
        "descrizione_errore": "The div has an onClick handler but it cannot be reached or activated with the keyboard, and a div is not an interactive element.",
        "codice_generatore": TRIGGER,
        "descrizione_risoluzione": "Give the div the button role, make it focusable with tabIndex and handle the Enter and Space keys with onKeyDown.",
        "codice_fix": '<div className="tooltip-trigger" role="button" tabIndex={0} onClick={handleMouseOver} onKeyDown={(e) => { if (e.key === \'Enter\' || e.key === \' \') handleMouseOver(); }}>{children}</div>',
    },
    {
        "descrizione_errore": "Interaction listeners are placed on a non-interactive element.",
        "codice_generatore": TRIGGER,
        "descrizione_risoluzione": "Use a native button element, which is focusable and keyboard operable.",
        "codice_fix": '<button className="tooltip-trigger" onClick={handleMouseOver} onKeyPress={handleMouseOver}>{children}</button>',
    },
])

_KEYBOARD_DESCRIPTIONS = [
    "The tooltip trigger is a div with an onClick handler but no keyboard event handler, so keyboard users cannot open the tooltip.",
    "The onClick event on the div is not accessible with the keyboard: no onKeyDown or onKeyUp handler is provided.",
    "Keyboard users cannot activate the tooltip trigger because the div only reacts to mouse clicks.",
]

# Detection response with four findings, three of them repeating the same
# keyboard problem on the trigger.
TOOLTIP_DETECT_RECORDS = [
    {"descrizione_errore": d, "codice_generatore": TRIGGER_OPEN, "criterio": "2.1.1"}
    for d in _KEYBOARD_DESCRIPTIONS
] + [
    {
        "descrizione_errore": "The clickable div has no role, so assistive technologies do not announce it as a button.",
        "codice_generatore": TRIGGER_OPEN,
        "criterio": "4.1.2",
    }
]
TOOLTIP_DETECT = dump(TOOLTIP_DETECT_RECORDS)

_KEYBOARD_FIX = {
    "descrizione_risoluzione": "Add a keyboard handler and make the trigger focusable.",
    "codice_fix": '<div className="tooltip-trigger" tabIndex={0} onClick={handleMouseOver} onKeyDown={handleMouseOver}>',
}
_ROLE_FIX = {
    "descrizione_risoluzione": "Give the trigger the button role and an accessible name, hiding the decorative wrapper from screen readers.",
    "codice_fix": '<div className="tooltip-trigger" role="button" tabIndex={0} onClick={handleMouseOver} onKeyDown={handleMouseOver} aria-hidden="true" aria-label="Show tooltip">',
}


def _tooltip_chain(records: list[dict]) -> str:
    out = []
    for r in records:
        extra = _ROLE_FIX if r["criterio"] == "4.1.2" else _KEYBOARD_FIX
        out.append({**r, **extra})
    return dump(out)


TOOLTIP_CHAIN_ALL = _tooltip_chain(TOOLTIP_DETECT_RECORDS)
TOOLTIP_CHAIN_UNIQUE = _tooltip_chain([TOOLTIP_DETECT_RECORDS[0], TOOLTIP_DETECT_RECORDS[3]])


def tooltip_case() -> Case:
    return Case(
        id="01-tooltip",
        ext="js",
        source=TOOLTIP,
        selection=TOOLTIP_SELECTION,
        seeds=[
            Seed("click-events-have-key-events", "2.1.1", TRIGGER,
                 "The tooltip trigger reacts to clicks only and cannot be operated with the keyboard.",
                 "Handle Enter and Space with onKeyDown.", ""),
            Seed("no-noninteractive-element-interactions", "4.1.2", TRIGGER,
                 "A click listener is attached to a non-interactive div without an interactive role.",
                 "Use a button element or give the div the button role.", ""),
            Seed("tooltip-role", "4.1.2", TIP,
                 "The tooltip text has no tooltip role.",
                 "Add role=\"tooltip\" to the tooltip text.", ""),
            Seed("tooltip-describedby", "1.3.1", TRIGGER,
                 "The trigger is not linked to the tooltip description with aria-describedby.",
                 "Give the tooltip an id and reference it from aria-describedby on the trigger.", ""),
            Seed("tooltip-aria-hidden", "4.1.2", TIP,
                 "The hidden tooltip text is still exposed to assistive technologies.",
                 "Set aria-hidden to the inverse of isVisible on the tooltip text.", ""),
        ],
        expect=[
            Expect("click-events-have-key-events", TRIGGER_OPEN),
            Expect("no-noninteractive-element-interactions", TRIGGER_OPEN),
        ],
        raw={
            "fix": TOOLTIP_FIX,
            "detect": TOOLTIP_DETECT,
            "chain_fix": TOOLTIP_CHAIN_UNIQUE,
            "chain_fix.no-dedupe": TOOLTIP_CHAIN_ALL,
        },
    )


def cases() -> list[Case]:
    out = [tooltip_case()]

    out.append(Case(
        id="02-html-img-missing-alt", ext="html",
        source="""<!DOCTYPE html>
<html lang="en">
<head>
  <meta charset="utf-8">
  <title>Acme</title>
</head>
<body>
  <header>
    <img src="logo.png" width="120">
    <nav><a href="/about">About us</a></nav>
  </header>
</body>
</html>
""",
        seeds=[Seed("img-alt-required", "1.1.1", '<img src="logo.png" width="120">',
                    "The logo image has no alt attribute, so screen readers announce the file name.",
                    "Add an alt text that names the company.",
                    '<img src="logo.png" width="120" alt="Acme">')],
        expect=[Expect("img-alt-required", '<img src="logo.png"')],
        detect="perfect-fenced", fix="perfect",
    ))

    out.append(Case(
        id="03-img-with-alt-clean", ext="jsx",
        source="""export function Avatar({ user }) {
  return (
    <figure className="avatar">
      <img src={user.photo} alt={`Portrait of ${user.name}`} />
      <figcaption>{user.name}</figcaption>
    </figure>
  );
}
""",
        detect="perfect",
    ))

    out.append(Case(
        id="04-anchor-empty", ext="jsx",
        source="""export const Social = () => (
  <ul className="social">
    <li><a href="https://example.org/feed"></a></li>
    <li><a href="https://example.org/chat"><i className="icon-chat" aria-hidden="true" /></a></li>
    <li><a href="https://example.org/mail">Mail</a></li>
  </ul>
);
""",
        seeds=[
            Seed("anchor-has-content", "2.4.4", '<a href="https://example.org/feed"></a>',
                 "The feed link has no content, so its purpose cannot be determined.",
                 "Give the link visible text.",
                 '<a href="https://example.org/feed">Feed</a>'),
            Seed("anchor-has-content", "2.4.4",
                 '<a href="https://example.org/chat"><i className="icon-chat" aria-hidden="true" /></a>',
                 "The chat link only contains an icon hidden from screen readers.",
                 "Add an aria-label that describes the link.",
                 '<a href="https://example.org/chat" aria-label="Chat"><i className="icon-chat" aria-hidden="true" /></a>'),
        ],
        expect=[
            Expect("anchor-has-content", '<a href="https://example.org/feed">'),
            Expect("anchor-has-content", '<a href="https://example.org/chat">'),
        ],
        detect="perfect-prose", chain="perfect",
    ))

    out.append(Case(
        id="05-anchor-content-clean", ext="jsx",
        source="""export function Breadcrumb({ items }) {
  return (
    <nav aria-label="Breadcrumb">
      <ol>
        {items.map((item) => (
          <li key={item.href}>
            <a href={item.href} title={item.label}>{item.label}</a>
          </li>
        ))}
      </ol>
    </nav>
  );
}
""",
        detect="false-positive",
    ))

    out.append(Case(
        id="06-clickable-card", ext="jsx",
        source="""export function Card({ title, onOpen }) {
  return (
    <article className="card">
      <div className="card-body" onClick={onOpen}>
        <h3>{title}</h3>
      </div>
    </article>
  );
}
""",
        seeds=[
            Seed("click-events-have-key-events", "2.1.1",
                 '<div className="card-body" onClick={onOpen}>\n        <h3>{title}</h3>\n      </div>',
                 "The card body opens on click but has no keyboard handler.",
                 "Add an onKeyDown handler, focusability and the button role.",
                 '<div className="card-body" role="button" tabIndex={0} onClick={onOpen} onKeyDown={onOpen}>\n        <h3>{title}</h3>\n      </div>'),
            Seed("no-noninteractive-element-interactions", "4.1.2",
                 '<div className="card-body" onClick={onOpen}>\n        <h3>{title}</h3>\n      </div>',
                 "A click listener is attached to a div that has no interactive role.",
                 "Give the div the button role and make it focusable.",
                 '<div className="card-body" role="button" tabIndex={0} onClick={onOpen} onKeyDown={onOpen}>\n        <h3>{title}</h3>\n      </div>'),
        ],
        expect=[
            Expect("click-events-have-key-events", '<div className="card-body"'),
            Expect("no-noninteractive-element-interactions", '<div className="card-body"'),
        ],
        detect="duplicate", fix="perfect",
    ))

    out.append(Case(
        id="07-span-button-not-focusable", ext="jsx",
        source="""export function Toggle({ on, toggle, onKey }) {
  return (
    <span role="button" onClick={toggle} onKeyDown={onKey} aria-pressed={on}>
      {on ? 'On' : 'Off'}
    </span>
  );
}
""",
        seeds=[Seed("interactive-supports-focus", "2.1.1",
                    "<span role=\"button\" onClick={toggle} onKeyDown={onKey} aria-pressed={on}>\n      {on ? 'On' : 'Off'}\n    </span>",
                    "The span has the button role but cannot receive keyboard focus.",
                    "Add tabIndex={0}.",
                    "<span role=\"button\" tabIndex={0} onClick={toggle} onKeyDown={onKey} aria-pressed={on}>\n      {on ? 'On' : 'Off'}\n    </span>")],
        expect=[Expect("interactive-supports-focus", '<span role="button"')],
        detect="italian", chain="italian", fix="italian",
    ))

    out.append(Case(
        id="08-invalid-role", ext="jsx",
        source="""export const DatePicker = ({ value }) => (
  <div role="datepicker" className="picker">
    <input type="date" defaultValue={value} aria-label="Date" />
  </div>
);
""",
        seeds=[Seed("aria-role-valid", "4.1.2", 'role="datepicker"',
                    "datepicker is not a valid ARIA role.",
                    "Use the group role for the picker container.",
                    '<div role="group" className="picker">',
                    quote='<div role="datepicker" className="picker">')],
        expect=[Expect("aria-role-valid", 'role="datepicker"')],
        detect="wrong-criterion", chain="perfect",
    ))

    out.append(Case(
        id="09-aria-prop-typo", ext="tsx",
        source="""type Props = { id: string };

export function Search({ id }: Props) {
  return (
    <form role="search">
      <span id={id}>Search the catalogue</span>
      <input type="search" aria-labeledby={id} />
    </form>
  );
}
""",
        seeds=[Seed("aria-props-valid", "4.1.2", "aria-labeledby={id}",
                    "aria-labeledby is misspelled and is not an ARIA attribute.",
                    "Use aria-labelledby.",
                    "<input type=\"search\" aria-labelledby={id} />",
                    quote="<input type=\"search\" aria-labeledby={id} />")],
        expect=[Expect("aria-props-valid", "aria-labeledby={id}")],
        detect="perfect", chain="perfect", fix="perfect-fenced",
    ))

    out.append(Case(
        id="10-hidden-with-label", ext="jsx",
        source="""export const Dialog = ({ onClose, children }) => (
  <div role="dialog" aria-modal="true">
    <button type="button" onClick={onClose} aria-hidden="true" aria-label="Close">×</button>
    {children}
  </div>
);
""",
        seeds=[Seed("no-aria-hidden-with-label", "4.1.2",
                    '<button type="button" onClick={onClose} aria-hidden="true" aria-label="Close">×</button>',
                    "The close button is labelled but hidden from assistive technologies.",
                    "Remove aria-hidden so the labelled button is exposed.",
                    '<button type="button" onClick={onClose} aria-label="Close">×</button>')],
        expect=[Expect("no-aria-hidden-with-label", '<button type="button" onClick={onClose}')],
        detect="perfect", chain="perfect", fix="perfect",
    ))

    out.append(Case(
        id="11-label-without-control", ext="jsx",
        source="""export function NameField({ value, onChange }) {
  return (
    <div className="field">
      <label>Full name</label>
      <input id="name" value={value} onChange={onChange} />
    </div>
  );
}
""",
        seeds=[Seed("label-has-associated-control", "3.3.2", "<label>Full name</label>",
                    "The label is not associated with the input.",
                    "Point the label at the input with htmlFor.",
                    '<label htmlFor="name">Full name</label>')],
        expect=[Expect("label-has-associated-control", "<label>")],
        detect="irrelevant", chain="perfect",
    ))

    out.append(Case(
        id="12-label-nested-clean", ext="jsx",
        source="""export function Consent({ checked, onToggle }) {
  return (
    <label className="consent">
      <input type="checkbox" checked={checked} onChange={onToggle} />
      I agree to the terms
    </label>
  );
}
""",
        detect="perfect",
    ))

    out.append(Case(
        id="13-autofocus", ext="jsx",
        source="""export function Login({ onSubmit }) {
  return (
    <form onSubmit={onSubmit}>
      <label htmlFor="user">User</label>
      <input id="user" type="text" autoFocus />
      <button type="submit">Sign in</button>
    </form>
  );
}
""",
        seeds=[Seed("no-autofocus", "3.2.1", "autoFocus",
                    "autoFocus moves focus unexpectedly when the form is rendered.",
                    "Remove the autoFocus attribute.",
                    '<input id="user" type="text" />',
                    quote='<input id="user" type="text" autoFocus />')],
        expect=[Expect("no-autofocus", "autoFocus")],
        detect="no-criterion", chain="perfect", fix="no-offending",
    ))

    out.append(Case(
        id="14-empty-heading", ext="jsx",
        source="""export const Section = ({ children }) => (
  <section>
    <h2></h2>
    {children}
  </section>
);
""",
        seeds=[Seed("heading-has-content", "2.4.6", "<h2></h2>",
                    "The heading is empty.",
                    "Give the heading a descriptive text.",
                    "<h2>Details</h2>")],
        expect=[Expect("heading-has-content", "<h2>")],
        detect="perfect", chain="perfect", fix="extra-field",
    ))

    out.append(Case(
        id="15-html-without-lang", ext="html",
        source="""<!doctype html>
<html>
  <head>
    <title>Orders</title>
  </head>
  <body>
    <main>
      <h1>Your orders</h1>
      <p>No orders yet.
    </main>
  </body>
</html>
""",
        seeds=[Seed("html-has-lang", "3.1.1", "<html>",
                    "The page does not declare its language.",
                    "Add the lang attribute.",
                    '<html lang="en">')],
        expect=[Expect("html-has-lang", "<html>")],
        detect="invalid-readable", fix="perfect",
    ))

    out.append(Case(
        id="16-custom-components-clean", ext="tsx",
        source="""import { Button, Icon } from './ui';

export function Toolbar({ onSave }: { onSave: () => void }) {
  return (
    <Toolbar.Root>
      <Button onClick={onSave}>
        <Icon name="save" />
      </Button>
      <Icon name="spacer" onClick={onSave} />
    </Toolbar.Root>
  );
}
""",
        detect="perfect",
    ))

    out.append(Case(
        id="17-spread-props", ext="jsx",
        source="""export function Thumb(props) {
  const { onPick, ...rest } = props;
  return (
    <div className="thumb">
      <img {...rest} />
      <div {...rest} onClick={onPick} />
    </div>
  );
}
""",
        detect="perfect",
    ))

    out.append(Case(
        id="18-tsx-product", ext="tsx",
        source="""interface Product {
  name: string;
  image: string;
}

export function ProductTile({ product, select }: { product: Product; select: () => void }) {
  return (
    <li className="tile" onClick={select}>
      <img src={product.image} />
      <input type="number" min={1} aria-label="Quantity" autoFocus />
      <span>{product.name}</span>
    </li>
  );
}
""",
        seeds=[
            Seed("click-events-have-key-events", "2.1.1",
                 '<li className="tile" onClick={select}>',
                 "The list item reacts to clicks without a keyboard handler.",
                 "Add onKeyDown alongside onClick.",
                 '<li className="tile" onClick={select} onKeyDown={select}>'),
            Seed("no-noninteractive-element-interactions", "4.1.2",
                 '<li className="tile" onClick={select}>',
                 "The list item is a non-interactive element with a click listener.",
                 "Move the handler to a button inside the list item.",
                 '<li className="tile">'),
            Seed("img-alt-required", "1.1.1", "<img src={product.image} />",
                 "The product image has no alt text.",
                 "Describe the product in the alt attribute.",
                 "<img src={product.image} alt={product.name} />"),
            Seed("no-autofocus", "3.2.1", "autoFocus",
                 "autoFocus on the quantity field moves focus unexpectedly.",
                 "Remove autoFocus.",
                 '<input type="number" min={1} aria-label="Quantity" />',
                 quote='<input type="number" min={1} aria-label="Quantity" autoFocus />'),
        ],
        expect=[
            Expect("click-events-have-key-events", '<li className="tile"'),
            Expect("no-noninteractive-element-interactions", '<li className="tile"'),
            Expect("img-alt-required", "<img src={product.image}"),
            Expect("no-autofocus", "autoFocus"),
        ],
        detect="miss-one", chain="perfect", fix="perfect",
    ))

    out.append(Case(
        id="19-html-form", ext="html",
        source="""<!DOCTYPE html>
<html lang="it">
<body>
  <form action="/subscribe">
    <label>Email</label>
    <input type="email" name="email" autofocus>
    <label for="plan">Plan</label>
    <select id="plan" name="plan"><option>Free<option>Pro</select>
    <button type="submit">Subscribe</button>
  </form>
</body>
</html>
""",
        seeds=[
            Seed("label-has-associated-control", "3.3.2", "<label>Email</label>",
                 "The Email label is not associated with its field.",
                 "Reference the field with the for attribute.",
                 '<label for="email">Email</label>'),
            Seed("no-autofocus", "3.2.1", "autofocus",
                 "The email field grabs focus on load.",
                 "Remove the autofocus attribute.",
                 '<input type="email" name="email">',
                 quote='<input type="email" name="email" autofocus>'),
        ],
        expect=[
            Expect("label-has-associated-control", "<label>Email"),
            Expect("no-autofocus", "autofocus"),
        ],
        detect="perfect-prose-fenced", chain="drop-code", fix="perfect",
    ))

    out.append(Case(
        id="20-image-in-ternary", ext="jsx",
        source="""export function Status({ ok }) {
  return (
    <p className="status">
      {ok ? <img src="/ok.svg" /> : <span className="error">Failed</span>}
    </p>
  );
}
""",
        seeds=[Seed("img-alt-required", "1.1.1", '<img src="/ok.svg" />',
                    "The status icon has no alt text.",
                    "Describe the status in the alt attribute.",
                    '<img src="/ok.svg" alt="Succeeded" />')],
        expect=[Expect("img-alt-required", '<img src="/ok.svg"')],
        detect="perfect", chain="syntax-break", fix="perfect",
    ))

    out.append(Case(
        id="21-settings-clean", ext="jsx",
        source="""export function Settings({ prefs, update }) {
  return (
    <section aria-labelledby="settings-title">
      <h2 id="settings-title">Settings</h2>
      <label htmlFor="theme">Theme</label>
      <select id="theme" value={prefs.theme} onChange={update}>
        <option value="light">Light</option>
        <option value="dark">Dark</option>
      </select>
      <button type="button" onClick={update}>Save</button>
      <a href="/help">Help</a>
    </section>
  );
}
""",
        detect="perfect",
    ))

    out.append(Case(
        id="22-html-clean", ext="html",
        source="""<!DOCTYPE html>
<html lang="en">
<head><title>Team</title></head>
<body>
  <h1>Our team</h1>
  <table>
    <tr><th>Name<th>Role
    <tr><td>Ada<td>Engineer
  </table>
  <img src="team.jpg" alt="The team at the office">
  <br>
  <a href="/jobs">Open positions</a>
</body>
</html>
""",
        detect="invalid-verbose",
    ))

    out.append(Case(
        id="23-span-link-clean", ext="jsx",
        source="""export const More = ({ go }) => (
  <span role="link" tabIndex={0} onClick={go} onKeyDown={go}>
    Read more
  </span>
);
""",
        detect="perfect",
    ))

    out.append(Case(
        id="24-heading-hidden-content", ext="jsx",
        source="""export const Rating = ({ stars }) => (
  <div className="rating">
    <h1><span aria-hidden="true">★★★</span></h1>
    <p>{stars} out of 5</p>
  </div>
);
""",
        seeds=[Seed("heading-has-content", "2.4.6", '<h1><span aria-hidden="true">★★★</span></h1>',
                    "The heading only contains content hidden from screen readers.",
                    "Add a visually hidden text to the heading.",
                    '<h1><span aria-hidden="true">★★★</span><span className="sr-only">Rating</span></h1>')],
        expect=[Expect("heading-has-content", "<h1>")],
        detect="perfect", chain="perfect", fix="new-issue",
    ))

    out.append(Case(
        id="25-anchor-aria-label-clean", ext="jsx",
        source="""export const Home = () => (
  <header>
    <a href="/" aria-label="Home page" className="logo" />
    <a href="/cart" title="Cart"><svg viewBox="0 0 10 10" /></a>
  </header>
);
""",
        detect="perfect",
    ))

    out.append(Case(
        id="26-role-tokens", ext="jsx",
        source="""export const Menu = ({ items }) => (
  <ul role="menu">
    <li role="menuitem presentation">First</li>
    <li role="buton">Second</li>
    <li role={items.role}>Third</li>
  </ul>
);
""",
        seeds=[Seed("aria-role-valid", "4.1.2", 'role="buton"',
                    "buton is not a valid ARIA role.",
                    "Use the menuitem role.",
                    '<li role="menuitem">Second</li>',
                    quote='<li role="buton">Second</li>')],
        expect=[Expect("aria-role-valid", 'role="buton"')],
        detect="perfect", chain="missing-fix",
    ))

    out.append(Case(
        id="27-plain-ts-clean", ext="ts",
        source="""export function clamp<T extends number>(value: T, min: T, max: T): number {
  return value < min ? min : value > max ? max : value;
}

export const isEmpty = (xs: Array<string>): boolean => xs.length === 0;
""",
        detect="perfect",
    ))

    out.append(Case(
        id="28-html-table-img", ext="html",
        source="""<!DOCTYPE html>
<html lang="en">
<body>
  <p>Price list
  <p>Updated weekly
  <table>
    <tr><td><img src="apple.png"><td>Apple<td>1.20
    <tr><td><img src="pear.png" alt="Pear"><td>Pear<td>1.50
  </table>
</body>
</html>
""",
        seeds=[Seed("img-alt-required", "1.1.1", '<img src="apple.png">',
                    "The apple image has no alt attribute.",
                    "Name the fruit in the alt attribute.",
                    '<img src="apple.png" alt="Apple">')],
        expect=[Expect("img-alt-required", '<img src="apple.png">')],
        detect="perfect", chain="perfect", fix="drop-code",
    ))

    out.append(Case(
        id="29-expression-flags", ext="jsx",
        source="""export function Badge({ count }) {
  return (
    <div className="badge">
      <span aria-hidden={true} aria-labelledby="badge-label">{count}</span>
      <input type="text" autoFocus={false} aria-label="Filter" />
    </div>
  );
}
""",
        seeds=[Seed("no-aria-hidden-with-label", "4.1.2",
                    '<span aria-hidden={true} aria-labelledby="badge-label">{count}</span>',
                    "The badge is hidden from assistive technologies but also carries a label.",
                    "Drop aria-labelledby from the hidden badge.",
                    "<span aria-hidden={true}>{count}</span>"),
               Seed("no-autofocus", "3.2.1", "autoFocus={false}",
                    "The filter input declares autoFocus.",
                    "Remove the autoFocus attribute.",
                    '<input type="text" aria-label="Filter" />',
                    quote='<input type="text" autoFocus={false} aria-label="Filter" />')],
        expect=[Expect("no-aria-hidden-with-label", "<span aria-hidden={true}"),
                Expect("no-autofocus", "autoFocus={false}")],
        detect="perfect", chain="perfect", fix="perfect",
    ))

    out.append(Case(
        id="30-mouse-handlers", ext="jsx",
        source="""export function Slider({ start, stop }) {
  return (
    <div className="slider">
      <div className="thumb" onMouseDown={start} onMouseUp={stop} />
    </div>
  );
}
""",
        seeds=[Seed("no-noninteractive-element-interactions", "4.1.2",
                    '<div className="thumb" onMouseDown={start} onMouseUp={stop} />',
                    "Mouse listeners are attached to a div with no interactive role.",
                    "Give the thumb the slider role with its value attributes and make it focusable.",
                    '<div className="thumb" role="slider" tabIndex={0} aria-valuenow={0} onMouseDown={start} onMouseUp={stop} />')],
        expect=[Expect("no-noninteractive-element-interactions", '<div className="thumb"')],
        detect="perfect", chain="perfect", fix="perfect",
    ))

    return out


# ---- writing ----------------------------------------------------------------

def write_case(case: Case) -> None:
    d = CASES_DIR / case.id
    if d.exists():
        shutil.rmtree(d)
    (d / "script").mkdir(parents=True)
    src = case.source
    (d / f"input.{case.ext}").write_bytes(src.encode("utf-8"))

    if case.selection is None:
        sel_start, sel_end = 0, len(src)
    else:
        sel_start = find(src, case.selection)
        sel_end = sel_start + len(case.selection)
    selection = {"start": byte_offset(src, sel_start), "end": byte_offset(src, sel_end)}

    seeded = []
    for s in case.seeds:
        start = find(src, s.snippet, s.occurrence)
        end = start + len(s.snippet)
        assert sel_start <= start and end <= sel_end, (case.id, s.snippet)
        seeded.append({
            "rule_id": s.rule_id,
            "criterion": s.criterion,
            "offending_span": {"start": byte_offset(src, start), "end": byte_offset(src, end)},
            "canonical_offending_code": s.snippet,
        })

    expected = []
    for e in case.expect:
        pos = byte_offset(src, find(src, e.anchor, e.occurrence))
        line, col = line_col(src, pos)
        expected.append({"line": line, "col": col, "rule_id": e.rule_id})
    expected.sort(key=lambda x: (x["line"], x["col"], x["rule_id"]))

    meta = {
        "id": case.id,
        "input": f"input.{case.ext}",
        "selection": selection,
        "clean": case.clean,
        "seeded_errors": seeded,
        "expected_diagnostics": expected,
    }
    (d / "case.json").write_text(json.dumps(meta, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")

    script = dict(case.raw)
    if "detect" not in script:
        records = detect_records(case)
        script["detect"] = render_stage(records, case.detect, DETECT_FIELDS)
        if "invalid" not in case.detect:
            uniq = unique_records(records)
            script["chain_fix"] = render_stage(chain_records(case, uniq), case.chain, CHAIN_FIELDS)
            if len(uniq) != len(records):
                script["chain_fix.no-dedupe"] = render_stage(chain_records(case, records), case.chain,
                                                             CHAIN_FIELDS)
    if "fix" not in script and case.expect:
        linted = {e.rule_id for e in case.expect}
        by_quote: dict[str, Seed] = {}
        for s in case.seeds:
            if s.rule_id in linted:
                by_quote.setdefault(s.quoted, s)
        script["fix"] = render_stage(fix_records(case, list(by_quote.values())), case.fix, FIX_FIELDS)
    for name, text in script.items():
        (d / "script" / f"{name}.txt").write_bytes(text.encode("utf-8"))


def main() -> None:
    CASES_DIR.mkdir(parents=True, exist_ok=True)
    all_cases = cases()
    assert len(all_cases) == 30
    assert len({c.id for c in all_cases}) == 30
    for c in all_cases:
        write_case(c)
    print(f"wrote {len(all_cases)} cases to {CASES_DIR.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
