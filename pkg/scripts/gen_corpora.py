#!/usr/bin/env python3
"""Generate the shipped desk-scale UniMorph-style corpora.

Real UniMorph dumps are large and externally hosted; the repo instead
ships small generated paradigm tables in the same TSV format
(lemma<TAB>form<TAB>tag;tag;...). Paradigms are built from regular,
non-alternating stems only (no Turkish final-stop mutation, no Finnish
consonant gradation, no Georgian syncope), so the forms are
orthographically faithful even though coverage is narrow.

Run from the repo root: python3 scripts/gen_corpora.py
"""

from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "morphoton" / "data" / "unimorph"

BACK = set("aıou")
FRONT = set("eiöü")


def tr_last_vowel(s: str) -> str:
    for ch in reversed(s):
        if ch in BACK | FRONT:
            return ch
    raise ValueError(s)


def tr_i(v: str) -> str:
    """Turkish four-way harmony of the high vowel I."""
    return {"e": "i", "i": "i", "a": "ı", "ı": "ı", "o": "u", "u": "u", "ö": "ü", "ü": "ü"}[v]


def tr_a(v: str) -> str:
    """Turkish two-way harmony of the low vowel A."""
    return "e" if v in FRONT else "a"


VOICELESS = set("fstkçşhp")

TURKISH_STEMS = [
    "ol", "gel", "al", "ver", "gör", "bil", "sev", "kal", "dur", "koş",
    "oku", "yürü", "iste", "bekle", "çalış", "konuş", "yaşa", "ara", "sor",
    "bul", "gir", "dön", "düşün", "anla", "dinle", "başla", "öğren",
    "getir", "götür", "yaz", "çiz", "gez", "otur", "uyu", "büyü", "söyle",
    "izle", "öde", "taşı", "ağla", "bağır", "çağır", "doğ", "sil", "kapa",
    "gönder", "çevir", "değiş", "karış", "savun", "kazan", "özle", "besle",
    "temizle", "hazırla", "kullan", "dene", "davran", "yıka", "boya",
    "oyna", "tara", "kuru", "eri", "üşü",
]


def turkish_forms(stem: str) -> list[tuple[str, str]]:
    out = []
    v = tr_last_vowel(stem)
    a, i = tr_a(v), tr_i(v)
    ends_vowel = stem[-1] in BACK | FRONT

    # Future: stem + (y)AcAk, k softens to ğ before vowel-initial endings.
    base = stem + ("y" if ends_vowel else "") + a + "c" + a
    fi = tr_i(a)
    out += [
        (base + "k", "V;FUT;3;SG"),
        (base + "klar" if a == "a" else base + "kler", "V;FUT;3;PL"),
        (base + "ğ" + fi + "m", "V;FUT;1;SG"),
        (base + "ks" + fi + "n", "V;FUT;2;SG"),
        (base + "ğ" + fi + "z", "V;FUT;1;PL"),
        (base + "ks" + fi + "n" + fi + "z", "V;FUT;2;PL"),
    ]

    # Past: stem + DI + person.
    d = "t" if stem[-1] in VOICELESS else "d"
    pst = stem + d + i
    out += [
        (pst, "V;PST;3;SG"),
        (pst + ("lar" if a == "a" else "ler"), "V;PST;3;PL"),
        (pst + "m", "V;PST;1;SG"),
        (pst + "n", "V;PST;2;SG"),
        (pst + "k", "V;PST;1;PL"),
        (pst + "n" + i + "z", "V;PST;2;PL"),
    ]

    # Progressive: stem (final vowel dropped) + Iyor + person.
    prog_stem = stem[:-1] if ends_vowel else stem
    pv = tr_i(tr_last_vowel(prog_stem))
    prog = prog_stem + pv + "yor"
    out += [
        (prog, "V;PROG;3;SG"),
        (prog + "lar", "V;PROG;3;PL"),
        (prog + "um", "V;PROG;1;SG"),
        (prog + "sun", "V;PROG;2;SG"),
        (prog + "uz", "V;PROG;1;PL"),
        (prog + "sunuz", "V;PROG;2;PL"),
    ]
    return out


FINNISH_STEMS = [
    "talo", "kala", "koira", "seinä", "silmä", "hylly", "kesä", "suola",
    "sana", "sauna", "koulu", "kirja", "lasi", "juna", "kissa", "karhu",
    "tyyny", "peili", "tuoli", "sohva", "laulu", "naula", "seura", "herra",
    "muna", "mela", "salama", "orava", "omena", "ilma", "metsä", "halla",
    "mylly", "hissi", "bussi", "maila", "suu", "maa", "puu", "pää", "työ",
    "lattia", "asema", "satama", "lelu", "hahmo", "norsu", "laiva",
    "leijona", "banaani", "huivi", "villa", "kynä", "suihku", "tarina",
    "peruna", "makkara", "kitara", "kamera", "apina", "porkkana",
]

FI_VOWELS = set("aeiouyäö")


def finnish_forms(stem: str) -> list[tuple[str, str]]:
    front = not (set(stem) & set("aou"))
    A = "ä" if front else "a"
    long_final = len(stem) >= 2 and stem[-1] in FI_VOWELS and (
        stem[-2] == stem[-1] or stem[-2:] in ("uo", "ie", "yö")
    )
    part = stem + ("t" + A if long_final else A)
    return [
        (stem, "N;NOM;SG"),
        (stem + "n", "N;GEN;SG"),
        (part, "N;PRT;SG"),
        (stem + "ss" + A, "N;INE;SG"),
        (stem + "ll" + A, "N;ADE;SG"),
        (stem + "lt" + A, "N;ABL;SG"),
        (stem + "lle", "N;ALL;SG"),
        (stem + "n" + A, "N;ESS;SG"),
        (stem + "ksi", "N;TRA;SG"),
        (stem + "t", "N;NOM;PL"),
    ]


GEORGIAN_STEMS = [
    "კაც", "წიგნ", "სახლ", "ქალ", "ხელ", "თვალ", "გულ", "ყვავილ",
    "ქალაქ", "წყალ", "ვარსკვლავ", "ბიჭ", "ძაღლ", "ბავშვ", "ხიდ", "ბაღ",
    "თავ", "ფეხ", "ყურ", "ცხვირ", "კბილ", "ტელეფონ", "კომპიუტერ",
    "სკამ", "კარ", "ჯარისკაც", "დათვ", "ლომ", "თევზ", "ფრინველ",
    "პურ", "ყველ", "ხორც", "წვეთ", "ქუდ", "ფულ", "ღილ", "ჩიტ", "თით",
    "ბალიშ", "ჟურნალ", "ბანკ", "პარკ", "ტორტ", "ლიფტ", "ბილეთ", "პასუხ",
    "ხალხ", "მზარეულ", "სახელ", "ტელევიზორ", "ავტობუს", "ექიმ",
    "პროფესორ", "სტუდენტ", "ინჟინერ", "დირექტორ", "ტრაქტორ", "მოტორ",
]

GE_CASES = [
    ("ი", "NOM"),
    ("მა", "ERG"),
    ("ს", "DAT"),
    ("ის", "GEN"),
    ("ით", "INS"),
    ("ად", "ADV"),
]


def georgian_forms(stem: str) -> list[tuple[str, str]]:
    out = []
    for suffix, case in GE_CASES:
        out.append((stem + suffix, f"N;{case};SG"))
        out.append((stem + "ებ" + suffix, f"N;{case};PL"))
    return out


def write_corpus(name: str, rows: list[tuple[str, str, str]]) -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    path = OUT_DIR / name
    with open(path, "w", encoding="utf-8") as fh:
        for lemma, form, tags in rows:
            fh.write(f"{lemma}\t{form}\t{tags}\n")
    print(f"wrote {path} ({len(rows)} forms)")


def main() -> None:
    tur = [(stem, form, tags) for stem in TURKISH_STEMS for form, tags in turkish_forms(stem)]
    write_corpus("tur.v.tsv", tur)

    fin = [(stem, form, tags) for stem in FINNISH_STEMS for form, tags in finnish_forms(stem)]
    write_corpus("fin.n.tsv", fin)

    kat = [
        (stem + "ი", form, tags)
        for stem in GEORGIAN_STEMS
        for form, tags in georgian_forms(stem)
    ]
    write_corpus("kat.n.tsv", kat)


if __name__ == "__main__":
    main()
