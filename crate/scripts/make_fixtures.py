#!/usr/bin/env python3
"""Regenerates everything under fixtures/.

- lexicon/published_{en,fr,de}.json: published item lists with bins and counts
- aux/{en,fr,de}.json: determiners, prepositions, relative-clause verbs, fillers, templates
- corpora/{childes,wiki}_en.{txt,ann}: two seeded synthetic 2,000-sentence corpora
- corpora/tiny.txt and stats/expected.json: hand-checkable corpus statistics
- lexicon/en_animate.txt, lexicon/en_picks.json, pipeline/en.json

Statistics in stats/expected.json are computed here, independently of the
Rust implementation, and serve as its oracle.
"""

import json
import random
import unicodedata
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"
SEED = 20240613

# (sg, pl, bin, freq) per published table; lemma is the singular for nouns.
EN = {
    "C": {
        "nouns": [
            ("roommate", "roommates", 0, 2), ("resident", "residents", 1, 6),
            ("librarian", "librarians", 2, 13), ("officer", "officers", 3, 36),
            ("toddler", "toddlers", 4, 90), ("farmer", "farmers", 5, 264),
            ("policeman", "policemen", 6, 380), ("doctor", "doctors", 7, 656),
            ("man", "men", 8, 2156), ("daddy", "daddies", 9, 7027),
        ],
        "verbs": [
            ("awaits", "await", 0, 2, "the guests"), ("complains", "complain", 1, 8, "about the noise"),
            ("arrives", "arrive", 2, 17, "at the station"), ("disappears", "disappear", 2, 42, "from the scene"),
            ("bows", "bow", 4, 243, "to the king"), ("hides", "hide", 4, 391, "from the chicken"),
            ("leaves", "leave", 6, 1793, "the room"), ("sits", "sit", 7, 4219, "in the car"),
            ("thinks", "think", 8, 14710, "about the trip"), ("goes", "go", 9, 27620, "to the new store"),
        ],
        "objects": [("guard", "guards", 3, 35), ("friend", "friends", 7, 1414)],
    },
    "W": {
        "nouns": [
            ("picker", "pickers", 0, 2), ("harvester", "harvesters", 0, 3),
            ("fireman", "firemen", 1, 11), ("superhero", "superheroes", 3, 27),
            ("explorer", "explorers", 4, 72), ("painter", "painters", 5, 161),
            ("parent", "parents", 6, 358), ("writer", "writers", 7, 629),
            ("president", "presidents", 8, 1473), ("group", "groups", 9, 3085),
        ],
        "verbs": [
            ("grinds", "grind", 0, 4, "the coffee beans"), ("exaggerates", "exaggerate", 1, 6, "with laughs"),
            ("screams", "scream", 2, 13, "very loudly"), ("swims", "swim", 3, 31, "in the pool"),
            ("enjoys", "enjoy", 4, 93, "the company of friends"), ("draws", "draw", 5, 212, "a nice picture"),
            ("rests", "rest", 6, 516, "on the couch"), ("runs", "run", 6, 975, "at the park"),
            ("plays", "play", 7, 1233, "with the toys"), ("works", "work", 8, 3545, "on a new project"),
        ],
        "objects": [("waiter", "waiters", 1, 10), ("speaker", "speakers", 6, 347)],
    },
}

# French and German entries add a lemma (verbs) or a gender key (nouns).
FR = {
    "C": {
        "nouns": [
            ("visiteur", "visiteurs", 0, 3, "m"), ("joueur", "joueurs", 1, 8, "m"),
            ("chanteur", "chanteurs", 2, 13, "m"), ("capitaine", "capitaines", 3, 32, "m"),
            ("homme", "hommes", 5, 84, "v"), ("pompier", "pompiers", 6, 171, "m"),
            ("dame", "dames", 6, 311, "f"), ("enfant", "enfants", 7, 667, "v"),
            ("lapin", "lapins", 8, 972, "m"),
        ],
        "verbs": [
            ("poursuivre", "poursuit", "poursuivent", 0, 4, "une nouvelle mission"),
            ("grandir", "grandit", "grandissent", 1, 19, "très rapidement"),
            ("apprendre", "apprend", "apprennent", 3, 65, "une nouvelle histoire"),
            ("descendre", "descend", "descendent", 4, 185, "les escaliers de la maison"),
            ("attendre", "attend", "attendent", 5, 258, "le repas chaud"),
            ("arriver", "arrive", "arrivent", 6, 973, "au lieu de rendez-vous"),
            ("mettre", "met", "mettent", 7, 1993, "la nappe sur la table"),
        ],
        "objects": [("femme", "femmes", 4, 71, "f"), ("adulte", "adultes", 3, 35, "v")],
    },
    "W": {
        "nouns": [
            ("gamin", "gamins", 0, 3, "m"), ("cuisinier", "cuisiniers", 2, 11, "m"),
            ("vilaine", "vilaines", 3, 18, "f"), ("avocat", "avocats", 4, 55, "v"),
            ("pilote", "pilotes", 6, 192, "m"), ("lecteur", "lecteurs", 6, 144, "m"),
            ("prince", "princes", 7, 480, "m"), ("personnage", "personnages", 8, 996, "m"),
            ("groupe", "groupes", 9, 1610, "m"),
        ],
        "verbs": [
            ("casser", "casse", "cassent", 1, 21, "le verre"),
            ("rentrer", "rentre", "rentrent", 2, 62, "dans la chambre"),
            ("continuer", "continue", "continuent", 5, 223, "sur la route"),
            ("suivre", "suit", "suivent", 5, 316, "le long chemin"),
            ("rendre", "rend", "rendent", 6, 381, "le stylo à sa maman"),
            ("aller", "va", "vont", 7, 575, "au marché"),
            ("permettre", "permet", "permettent", 8, 1062, "l'accès aux escaliers"),
        ],
        "objects": [("constructeur", "constructeurs", 5, 106, "m"), ("docteur", "docteurs", 5, 85, "m")],
    },
}

DE = {
    "C": {
        "nouns": [
            ("feind", "feinde", 0, 4, "m"), ("architekt", "architekten", 0, 4, "m"),
            ("präsident", "präsidenten", 1, 6, "m"), ("kollege", "kollegen", 2, 17, "m"),
            ("ingenieur", "ingenieure", 3, 26, "m"), ("sohn", "söhne", 4, 96, "m"),
            ("arzt", "ärzte", 5, 161, "m"), ("doktor", "doktoren", 6, 295, "m"),
            ("mensch", "menschen", 7, 1247, "m"), ("frau", "frauen", 8, 1841, "f"),
        ],
        "verbs": [
            ("zweifeln", "zweifelt", "zweifeln", 0, 4, "am wetter"),
            ("konstruieren", "konstruiert", "konstruieren", 1, 5, "ein modell"),
            ("fürchten", "fürchtet", "fürchten", 3, 31, "den starken sturm"),
            ("schälen", "schält", "schälen", 3, 40, "den reifen grünen apfel"),
            ("tauchen", "taucht", "tauchen", 4, 64, "in das wasser des meeres"),
            ("kennen", "kennt", "kennen", 5, 259, "die antwort auf die frage"),
            ("schreiben", "schreibt", "schreiben", 7, 865, "einen brief an verwandte"),
            ("erzählen", "erzählt", "erzählen", 7, 1081, "eine geschichte über die ferien"),
            ("spielen", "spielt", "spielen", 8, 3149, "mit dem ball auf dem hof"),
            ("kommen", "kommt", "kommen", 9, 8982, "mit dem bus zum tennisplatz"),
        ],
        "objects": [("mitglied", "mitglieder", 1, 8, "n"), ("bauer", "bauern", 6, 332, "m")],
    },
    "W": {
        "nouns": [
            ("fahrgast", "fahrgäste", 1, 8, "m"), ("kleinkind", "kleinkinder", 2, 12, "n"),
            ("zwilling", "zwillinge", 3, 23, "m"), ("polizist", "polizisten", 3, 39, "m"),
            ("kunde", "kunden", 5, 105, "m"), ("schwester", "schwestern", 5, 171, "f"),
            ("bruder", "brüder", 6, 374, "m"), ("vater", "väter", 7, 736, "m"),
            ("mann", "männer", 7, 642, "m"), ("person", "personen", 8, 1114, "f"),
        ],
        "verbs": [
            ("schaukeln", "schaukelt", "schaukeln", 0, 2, "auf dem spielplatz"),
            ("flüchten", "flüchtet", "flüchten", 2, 13, "vor dem feuer"),
            ("riechen", "riecht", "riechen", 2, 12, "den duft von frischem kaffee"),
            ("wandern", "wandert", "wandern", 4, 36, "durch den wald"),
            ("feiern", "feiert", "feiern", 4, 48, "den geburtstag des großvaters"),
            ("verschwinden", "verschwindet", "verschwinden", 5, 68, "im nebel"),
            ("denken", "denkt", "denken", 6, 210, "an blumen im garten"),
            ("sprechen", "spricht", "sprechen", 7, 529, "über das abendessen"),
            ("arbeiten", "arbeitet", "arbeiten", 8, 640, "an einem projekt"),
            ("liegen", "liegt", "liegen", 9, 2220, "auf dem boden"),
        ],
        "objects": [("matrose", "matrosen", 1, 11, "m"), ("familie", "familien", 8, 959, "f")],
    },
}

CORPUS_IDS = {"C": "childes", "W": "wiki"}


def entry(lemma, sg, pl, pos, bin_, freq, corpus, gender=None):
    e = {
        "lemma": lemma,
        "form_sg": sg,
        "form_pl": pl,
        "pos": pos,
        "freq": {corpus: {"sg": freq}},
        "bin": bin_,
        "source_corpus": corpus,
    }
    if pos == "noun":
        e["animate"] = True
    if gender:
        e["gender"] = gender
    return e


def bins(freqs):
    return {"num_bins": 10, "f_min": min(freqs), "f_max": max(freqs)}


def published_lexicon(language, table):
    sources = []
    for label, t in table.items():
        corpus = CORPUS_IDS[label]
        nouns, verbs, objects = [], [], []
        for row in t["nouns"]:
            nouns.append(entry(row[0], row[0], row[1], "noun", row[2], row[3], corpus, *row[4:5]))
        for row in t["objects"]:
            objects.append(entry(row[0], row[0], row[1], "noun", row[2], row[3], corpus, *row[4:5]))
        for row in t["verbs"]:
            if language == "en":
                sg, pl, b, f = row[:4]
                verbs.append(entry(pl, sg, pl, "verb", b, f, corpus))
            else:
                lemma, sg, pl, b, f = row[:5]
                verbs.append(entry(lemma, sg, pl, "verb", b, f, corpus))
        sources.append({
            "label": label,
            "corpus": corpus,
            "noun_bins": bins([n["freq"][corpus]["sg"] for n in nouns + objects]),
            "verb_bins": bins([v["freq"][corpus]["sg"] for v in verbs]),
            "nouns": nouns,
            "verbs": verbs,
            "object_nouns": objects,
        })
    return {"language": language, "corpora": ["childes", "wiki"], "provenance": "reference", "sources": sources}


def fillers(language, table):
    out = {}
    for t in table.values():
        for row in t["verbs"]:
            lemma = row[1] if language == "en" else row[0]
            out[lemma] = row[-1]
    return dict(sorted(out.items()))


def templates(conj, rel_subj, rel_obj, comma=False):
    subj = "{det:subj:nom} {noun:subj:nom}"
    attr = "{det:attr:nom} {noun:attr:nom}"
    if comma:
        subj_rel = f"{subj} , {{pro:subj:nom}} {{det:attr:acc}} {{noun:attr:acc}} {{rel}} , {{verb}}"
        across = f"{subj} , {{pro:subj:acc}} {attr} {{rel}} , {{verb}}"
        within = f"{attr} , {{pro:attr:acc}} {subj} {{verb}} , {{main}}"
    else:
        subj_rel = f"{subj} {rel_subj} {{rel}} {attr} {{verb}}"
        across = f"{subj} {rel_obj} {attr} {{rel}} {{verb}}"
        within = f"{attr} {rel_obj} {subj} {{verb}} {{main}}"
    return {
        "simple_agreement": f"{subj} {{verb}}",
        "agreement_prep_phrase": f"{subj} {{prep}} {{det:attr:prep}} {{noun:attr:prep}} {{verb}}",
        "agreement_subj_rel_clause": subj_rel,
        "agreement_obj_rel_clause_across": across,
        "agreement_obj_rel_clause_within": within,
        "agreement_vp_coord": f"{subj} {{verb1}} {conj} {{verb}}",
        "agreement_long_vp_coord": f"{subj} {{verb1}} {{filler1}} {conj} {{verb}} {{filler2}}",
    }


def aux_en():
    return {
        "language": "en",
        "determiners": {"nom": {"*": ["the", "the"]}},
        "prepositions": [{"form": p} for p in
                         ["next to", "behind", "in front of", "near", "to the side of", "across from"]],
        "rel_verbs": [
            {"lemma": "like", "sg": "likes", "pl": "like"},
            {"lemma": "hate", "sg": "hates", "pl": "hate"},
            {"lemma": "love", "sg": "loves", "pl": "love"},
            {"lemma": "admire", "sg": "admires", "pl": "admire"},
        ],
        "long_vp_fillers": fillers("en", EN),
        "templates": templates("and", "that", "that"),
    }


def aux_fr():
    nom = {"m": ["le", "les"], "f": ["la", "les"], "v": ["l'", "les"]}
    de = {"m": ["du", "des"], "f": ["de la", "des"], "v": ["de l'", "des"]}
    return {
        "language": "fr",
        "determiners": {"nom": nom, "de": de},
        "prepositions": [
            {"form": "devant", "case": "nom"}, {"form": "derrière", "case": "nom"},
            {"form": "en face", "case": "de"}, {"form": "à côté", "case": "de"},
            {"form": "près", "case": "de"},
        ],
        "rel_verbs": [{"lemma": "aimer", "sg": "aime", "pl": "aiment"}],
        "long_vp_fillers": fillers("fr", FR),
        "templates": templates("et", "qui", "que"),
    }


def aux_de():
    nom = {"m": ["der", "die"], "f": ["die", "die"], "n": ["das", "die"]}
    acc = {"m": ["den", "die"], "f": ["die", "die"], "n": ["das", "die"]}
    dat = {"m": ["dem", "den"], "f": ["der", "den"], "n": ["dem", "den"]}
    return {
        "language": "de",
        "determiners": {"nom": nom, "acc": acc, "dat": dat},
        "relative_pronouns": {"nom": nom, "acc": acc},
        "noun_forms": {
            "bauer": {"acc": ["bauern", "bauern"], "dat": ["bauern", "bauern"]},
            "matrose": {"acc": ["matrosen", "matrosen"], "dat": ["matrosen", "matrosen"]},
            "mitglied": {"dat": ["mitglied", "mitgliedern"]},
        },
        "prepositions": [{"form": p, "case": "dat"} for p in
                         ["vor", "hinter", "neben", "in der nähe von", "gegenüber"]],
        "rel_verbs": [
            {"lemma": "mögen", "sg": "mag", "pl": "mögen"},
            {"lemma": "vermeiden", "sg": "vermeidet", "pl": "vermeiden"},
        ],
        "long_vp_fillers": fillers("de", DE),
        "templates": templates("und", None, None, comma=True),
    }


# ---------------------------------------------------------------- corpora

INANIMATE = [("ball", "balls"), ("table", "tables"), ("book", "books"), ("car", "cars")]
REL_VERBS = [("likes", "like"), ("hates", "hate"), ("loves", "love"), ("admires", "admire")]
PLACES = ["river", "city", "village", "museum", "school", "harbor", "valley"]
ADJS = ["old", "new", "small", "famous", "local", "young"]
PUNCT = {".", ",", "?", "!"}


def lexicon_items(label):
    t = EN[label]
    nouns = [(sg, pl, f) for sg, pl, _, f in t["nouns"] + t["objects"]]
    verbs = [(sg, pl, f, filler) for sg, pl, _, f, filler in t["verbs"]]
    return nouns, verbs


class Builder:
    def __init__(self, home, seed):
        self.rng = random.Random(seed)
        own_n, own_v = lexicon_items(home)
        other = "W" if home == "C" else "C"
        far_n, far_v = lexicon_items(other)
        # in-distribution items weighted by their published counts, the other
        # distribution's items kept rare but attested
        self.nouns = [(sg, pl) for sg, pl, _ in own_n + far_n]
        self.noun_w = [f ** 0.6 for *_, f in own_n] + [0.4 * f ** 0.3 for *_, f in far_n]
        self.verbs = [(sg, pl, filler) for sg, pl, _, filler in own_v + far_v]
        self.verb_w = [f ** 0.5 for _, _, f, _ in own_v] + [0.4 * f ** 0.25 for _, _, f, _ in far_v]

    def noun(self):
        return self.rng.choices(self.nouns, self.noun_w)[0]

    def verb(self):
        return self.rng.choices(self.verbs, self.verb_w)[0]

    def np(self, n, plural=None):
        plural = self.rng.random() < 0.4 if plural is None else plural
        return ["the", n[1] if plural else n[0]], plural


def child_sentence(b):
    r = b.rng.random()
    n, v = b.noun(), b.verb()
    np, pl = b.np(n)
    vf = v[1] if pl else v[0]
    if r < 0.25:
        return np + [vf, "."]
    if r < 0.40:
        return ["does", "the", n[0], v[1], "?"]
    if r < 0.50:
        return ["where", "are", "the", n[1], "?"]
    if r < 0.60:
        return ["look", ","] + np + [vf, "!"]
    if r < 0.70:
        return np + [vf] + v[2].split() + ["."]
    if r < 0.78:
        obj = b.rng.choice(INANIMATE)
        return ["do", "you", "want", "the", obj[b.rng.random() < 0.5], "?"]
    if r < 0.86:
        rel = b.rng.choice(REL_VERBS)
        o, opl = b.np(b.noun())
        return np + ["that", rel[1] if pl else rel[0]] + o + [vf, "."]
    if r < 0.93:
        return ["what", "does", "the", n[0], v[1], "?"]
    return ["yes", ",", "the", n[1], v[1], "."]


def wiki_sentence(b):
    r = b.rng.random()
    n, v = b.noun(), b.verb()
    np, pl = b.np(n)
    vf = v[1] if pl else v[0]
    place = ["the", b.rng.choice(ADJS), b.rng.choice(PLACES)]
    year = str(b.rng.randint(1850, 2020))
    if r < 0.25:
        return ["in", year, ","] + np + [vf] + v[2].split() + ["near"] + place + ["."]
    if r < 0.45:
        rel = b.rng.choice(REL_VERBS)
        o, opl = b.np(b.noun())
        return np + ["that"] + o + [rel[1] if opl else rel[0], vf, "in"] + place + ["."]
    if r < 0.60:
        return ["according", "to", "the", "report", ","] + np + [vf] + v[2].split() + ["."]
    if r < 0.72:
        v2 = b.verb()
        return np + [vf, "and", v2[1] if pl else v2[0], "during", "the", "season", "of", year, "."]
    if r < 0.84:
        obj = b.rng.choice(INANIMATE)
        return np + ["near", "the", obj[1], vf, "every", "year", "."]
    if r < 0.97:
        return ["the", b.rng.choice(ADJS)] + np[1:] + [vf, "in"] + place + [",", "which", "is", "known", "for", "its", "history", "."]
    return ["why", "does", "the", n[0], v[1], "?"]


def coverage(b):
    """One sentence per form so every item is attested in both numbers."""
    out = []
    for sg, pl in b.nouns:
        v = b.verb()
        out.append(["the", sg, v[0], "."])
        out.append(["the", pl, v[1], "."])
    for sg, pl, _ in b.verbs:
        n = b.noun()
        out.append(["the", n[0], sg, "."])
        out.append(["the", n[1], pl, "."])
    for sg, pl in REL_VERBS + INANIMATE:
        out.append(["the", b.noun()[0], sg, "."] if (sg, pl) in REL_VERBS else ["the", sg, "is", "here", "."])
        out.append(["the", b.noun()[1], pl, "."] if (sg, pl) in REL_VERBS else ["the", pl, "are", "here", "."])
    return out


def build_corpus(home, make, seed, size=2000):
    b = Builder(home, seed)
    sents = coverage(b)
    while len(sents) < size:
        sents.append(make(b))
    b.rng.shuffle(sents)
    return sents


def annotate(sents):
    nouns = {}
    verbs = {}
    for t in EN.values():
        for sg, pl, *_ in t["nouns"] + t["objects"]:
            nouns[sg] = (sg, "Number=Sing")
            nouns[pl] = (sg, "Number=Plur")
        for sg, pl, *_ in t["verbs"]:
            verbs[sg] = (pl, "Mood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin")
            verbs[pl] = (pl, "Tense=Pres|VerbForm=Fin")
    for sg, pl in INANIMATE:
        nouns[sg] = (sg, "Number=Sing")
        nouns[pl] = (sg, "Number=Plur")
    for sg, pl in REL_VERBS:
        verbs[sg] = (pl, "Mood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin")
        verbs[pl] = (pl, "Tense=Pres|VerbForm=Fin")
    lines = []
    for s in sents:
        for tok in s:
            if tok in nouns:
                lemma, feats = nouns[tok]
                upos = "NOUN"
            elif tok in verbs:
                lemma, feats = verbs[tok]
                upos = "VERB"
            elif tok in PUNCT:
                lemma, feats, upos = tok, "_", "PUNCT"
            elif tok == "the":
                lemma, feats, upos = tok, "Definite=Def", "DET"
            else:
                lemma, feats, upos = tok, "_", "X"
            lines.append(f"{tok}\t{lemma}\t{upos}\t{feats}")
        lines.append("")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- oracle


def is_punct(tok):
    return len(tok) > 0 and all(unicodedata.category(c).startswith("P") for c in tok)


def stats(path, exclude_punct=True):
    sents = []
    questions = 0
    for line in path.read_text(encoding="utf-8").split("\n"):
        toks = line.lower().split()
        if not toks:
            continue
        questions += line.rstrip().endswith("?")
        sents.append([t for t in toks if not (exclude_punct and is_punct(t))])
    total = len(sents)
    kept = [s for s in sents if s]
    tokens = sum(len(s) for s in kept)
    out = {
        "token_count": tokens,
        "avg_sentence_length": tokens / len(kept),
        "interrogative_fraction": questions / total,
    }
    for n in (1, 2, 3):
        grams = [tuple(s[i:i + n]) for s in kept for i in range(len(s) - n + 1)]
        out[f"ttr_{n}"] = len(set(grams)) / len(grams) if grams else None
    return out


TINY = """the cat sat .
the cat sat on the mat .
did the cat sit ?
where is the mat ?
the dog , the cat and the bird sat .
  is it on the mat ?
"""


def write_json(path, obj):
    path.write_text(json.dumps(obj, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def main():
    for lang, table in (("en", EN), ("fr", FR), ("de", DE)):
        write_json(ROOT / "lexicon" / f"published_{lang}.json", published_lexicon(lang, table))
    write_json(ROOT / "aux" / "en.json", aux_en())
    write_json(ROOT / "aux" / "fr.json", aux_fr())
    write_json(ROOT / "aux" / "de.json", aux_de())

    corpora = {
        "childes_en": build_corpus("C", child_sentence, SEED),
        "wiki_en": build_corpus("W", wiki_sentence, SEED + 1),
    }
    for name, sents in corpora.items():
        (ROOT / "corpora" / f"{name}.txt").write_text("\n".join(" ".join(s) for s in sents) + "\n", encoding="utf-8")
        (ROOT / "corpora" / f"{name}.ann").write_text(annotate(sents), encoding="utf-8")
    (ROOT / "corpora" / "tiny.txt").write_text(TINY, encoding="utf-8")

    expected = {}
    for name in ("tiny", "childes_en", "wiki_en"):
        p = ROOT / "corpora" / f"{name}.txt"
        expected[name] = {"exclude": stats(p, True), "include": stats(p, False)}
    write_json(ROOT / "stats" / "expected.json", expected)

    animate = sorted({sg for t in EN.values() for sg, *_ in t["nouns"] + t["objects"]})
    (ROOT / "lexicon" / "en_animate.txt").write_text("\n".join(animate) + "\n", encoding="utf-8")
    picks = {"language": "en", "sources": []}
    for label, t in EN.items():
        picks["sources"].append({
            "label": label,
            "corpus": CORPUS_IDS[label],
            "nouns": [{"lemma": sg} for sg, *_ in t["nouns"]],
            "verbs": [{"lemma": pl} for _, pl, *_ in t["verbs"]],
            "object_nouns": [{"lemma": sg} for sg, *_ in t["objects"]],
        })
    write_json(ROOT / "lexicon" / "en_picks.json", picks)

    write_json(ROOT / "pipeline" / "en.json", {
        "language": "en",
        "corpora": {
            "C": {"id": "childes", "path": "../corpora/childes_en.txt", "annotations": "../corpora/childes_en.ann"},
            "W": {"id": "wiki", "path": "../corpora/wiki_en.txt", "annotations": "../corpora/wiki_en.ann"},
        },
        "case_mode": "lower",
        "tokenizer": {"vocab_size": 8192},
        "ngram": {"order": 3, "discount": 0.75},
        "lexicon": {"allowlist": "../lexicon/en_animate.txt", "picks": "../lexicon/en_picks.json", "bins": 10},
        "aux": "../aux/en.json",
        "region": "critical",
        "out_dir": "../../target/pipeline-en",
    })


if __name__ == "__main__":
    main()
