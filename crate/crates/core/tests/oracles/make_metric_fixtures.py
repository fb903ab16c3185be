"""Generates tests/fixtures/metric_oracle.json.

SARI values come from a transcription of the metric authors' sentence-level
reference script (SARI.py, lowercased, single-space split). BLEU values come
from sacrebleu with tokenization and smoothing disabled. Every text is
pre-tokenized (space-separated tokens), so the crate's tokenizer is a no-op
on it.

    python3 make_metric_fixtures.py > ../fixtures/metric_oracle.json
"""
import json
import random
import sys
from collections import Counter

import sacrebleu


# --- SARI, after the reference script -------------------------------------

def SARIngram(sgrams, cgrams, rgramslist, numref):
    rgramsall = [rgram for rgrams in rgramslist for rgram in rgrams]
    rgramcounter = Counter(rgramsall)

    sgramcounter = Counter(sgrams)
    sgramcounter_rep = Counter()
    for sgram, scount in sgramcounter.items():
        sgramcounter_rep[sgram] = scount * numref

    cgramcounter = Counter(cgrams)
    cgramcounter_rep = Counter()
    for cgram, ccount in cgramcounter.items():
        cgramcounter_rep[cgram] = ccount * numref

    # KEEP
    keepgramcounter_rep = sgramcounter_rep & cgramcounter_rep
    keepgramcountergood_rep = keepgramcounter_rep & rgramcounter
    keepgramcounterall_rep = sgramcounter_rep & rgramcounter

    keeptmpscore1 = 0
    keeptmpscore2 = 0
    for keepgram in keepgramcountergood_rep:
        keeptmpscore1 += keepgramcountergood_rep[keepgram] / keepgramcounter_rep[keepgram]
        keeptmpscore2 += keepgramcountergood_rep[keepgram] / keepgramcounterall_rep[keepgram]
    keepscore_precision = 0
    if len(keepgramcounter_rep) > 0:
        keepscore_precision = keeptmpscore1 / len(keepgramcounter_rep)
    keepscore_recall = 0
    if len(keepgramcounterall_rep) > 0:
        keepscore_recall = keeptmpscore2 / len(keepgramcounterall_rep)
    keepscore = 0
    if keepscore_precision > 0 or keepscore_recall > 0:
        keepscore = 2 * keepscore_precision * keepscore_recall / (keepscore_precision + keepscore_recall)

    # DELETION
    delgramcounter_rep = sgramcounter_rep - cgramcounter_rep
    delgramcountergood_rep = delgramcounter_rep - rgramcounter
    delgramcounterall_rep = sgramcounter_rep - rgramcounter
    deltmpscore1 = 0
    for delgram in delgramcountergood_rep:
        deltmpscore1 += delgramcountergood_rep[delgram] / delgramcounter_rep[delgram]
    delscore_precision = 0
    if len(delgramcounter_rep) > 0:
        delscore_precision = deltmpscore1 / len(delgramcounter_rep)

    # ADDITION
    addgramcounter = set(cgramcounter) - set(sgramcounter)
    addgramcountergood = set(addgramcounter) & set(rgramcounter)
    addgramcounterall = set(rgramcounter) - set(sgramcounter)

    addtmpscore = 0
    for addgram in addgramcounter:
        if addgram in addgramcountergood:
            addtmpscore += 1

    addscore_precision = 0
    addscore_recall = 0
    if len(addgramcounter) > 0:
        addscore_precision = addtmpscore / len(addgramcounter)
    if len(addgramcounterall) > 0:
        addscore_recall = addtmpscore / len(addgramcounterall)
    addscore = 0
    if addscore_precision > 0 or addscore_recall > 0:
        addscore = 2 * addscore_precision * addscore_recall / (addscore_precision + addscore_recall)

    return (keepscore, delscore_precision, addscore)


def ngrams(tokens, n):
    return [" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def SARIsent(ssent, csent, rsents):
    numref = len(rsents)
    s1 = ssent.lower().split(" ")
    c1 = csent.lower().split(" ")
    r1 = [r.lower().split(" ") for r in rsents]
    keeps, dels, adds = [], [], []
    for n in range(1, 5):
        k, d, a = SARIngram(ngrams(s1, n), ngrams(c1, n), [ngrams(r, n) for r in r1], numref)
        keeps.append(k)
        dels.append(d)
        adds.append(a)
    avgkeep = sum(keeps) / 4
    avgdel = sum(dels) / 4
    avgadd = sum(adds) / 4
    return (avgkeep + avgdel + avgadd) / 3, avgkeep, avgdel, avgadd


# --- random pre-tokenized material -----------------------------------------

VOCAB = (
    "я ти він вона ми вони це той дім вода сонце місто день ніч рік слово "
    "текст речення добре погано швидко повільно іде пише читає бачить знає "
    "великий малий новий старий і а але що як тому бо , . ? ! « » - зв'язок "
    "Київ Україна Вода Місто 95 2024"
).split()


def sentence(rng, lo=3, hi=18):
    return [rng.choice(VOCAB) for _ in range(rng.randint(lo, hi))]


def mutate(rng, tokens, rate):
    out = []
    for tok in tokens:
        roll = rng.random()
        if roll < rate / 3:
            continue
        if roll < 2 * rate / 3:
            out.append(rng.choice(VOCAB))
            continue
        out.append(tok)
        if roll < rate:
            out.append(rng.choice(VOCAB))
    if not out:
        out = [rng.choice(VOCAB)]
    if rng.random() < 0.15 and len(out) > 2:
        i = rng.randrange(len(out) - 1)
        out[i], out[i + 1] = out[i + 1], out[i]
    return out


def main():
    rng = random.Random(20240419)

    sari_cases = [
        ("a b c d", "a b c d", ["a b c d"]),
        (
            "about 95 species are currently accepted .",
            "about 95 species are currently agreed .",
            ["about 95 species are currently known ."],
        ),
        (
            "about 95 species are currently accepted .",
            "about 95 species are currently agreed .",
            [
                "about 95 species are currently known .",
                "about 95 species are now accepted .",
                "95 species are now accepted .",
            ],
        ),
        ("Вода спочатку холодна , а потім волога .", "Вода холодна і мокра .", ["Вода і холодна , і мокра ."]),
    ]
    while len(sari_cases) < 50:
        src = sentence(rng)
        refs = [" ".join(mutate(rng, src, 0.3)) for _ in range(rng.randint(1, 4))]
        kind = rng.random()
        if kind < 0.1:
            hyp = list(src)
        elif kind < 0.2:
            hyp = refs[0].split(" ")
        else:
            hyp = mutate(rng, src, rng.choice([0.1, 0.3, 0.6]))
        sari_cases.append((" ".join(src), " ".join(hyp), refs))

    sari = []
    for src, hyp, refs in sari_cases:
        total, keep, dele, add = SARIsent(src, hyp, refs)
        sari.append({
            "source": src, "hypothesis": hyp, "references": refs,
            "sari": total, "keep": keep, "del": dele, "add": add,
        })

    def bleu_case(name, hyps, refs_per_hyp):
        num_refs = len(refs_per_hyp[0])
        assert all(len(r) == num_refs for r in refs_per_hyp)
        streams = [[refs[k] for refs in refs_per_hyp] for k in range(num_refs)]
        score = sacrebleu.corpus_bleu(
            hyps, streams, tokenize="none", smooth_method="none", force=True
        )
        return {
            "name": name,
            "hypotheses": hyps,
            "references": refs_per_hyp,
            "bleu": score.score / 100.0,
            "precisions": [p / 100.0 for p in score.precisions],
            "brevity_penalty": score.bp,
            "sys_len": score.sys_len,
            "ref_len": score.ref_len,
        }

    srcs = [sentence(rng, 4, 20) for _ in range(50)]
    hyps = [mutate(rng, s, 0.25) for s in srcs]
    refs1 = [[" ".join(mutate(rng, s, 0.3))] for s in srcs]
    refs3 = [[" ".join(mutate(rng, s, 0.35)) for _ in range(3)] for s in srcs]
    short_hyps = [h[: max(4, len(h) // 2)] for h in hyps]
    H = [" ".join(h) for h in hyps]
    S = [" ".join(s) for s in srcs]
    bleu = [
        bleu_case("ref_based_single", H, refs1),
        bleu_case("ref_based_multi", H, refs3),
        bleu_case("ref_free", H, [[s] for s in S]),
        bleu_case("copy_ref_free", S, [[s] for s in S]),
        bleu_case("copy_ref_based", S, refs1),
        bleu_case("short_hypotheses", [" ".join(h) for h in short_hyps], refs1),
    ]

    json.dump({"sari": sari, "bleu": bleu}, sys.stdout, ensure_ascii=False, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
