#!/usr/bin/env python3
"""Generate frozen word/stem pairs for the stemmer tests.

Independent transcription of the classic suffix-stripping algorithm (with the
author's two later step-2 amendments), written as declarative rule tables
rather than the usual buffer-walking port so that a transcription slip in the
C++ implementation and a slip here are unlikely to coincide.

Usage: python3 scripts/gen_porter_pairs.py > tests/fixtures/porter_pairs.txt
"""

VOWELS = set("aeiou")


def is_cons(word, i):
    c = word[i]
    if c in VOWELS:
        return False
    if c == "y":
        return True if i == 0 else not is_cons(word, i - 1)
    return True


def measure(word):
    """Number of vowel-run -> consonant-run transitions (the 'm' value)."""
    m = 0
    for i in range(1, len(word)):
        if is_cons(word, i) and not is_cons(word, i - 1):
            m += 1
    return m


def has_vowel(word):
    return any(not is_cons(word, i) for i in range(len(word)))


def ends_double_cons(word):
    return len(word) >= 2 and word[-1] == word[-2] and is_cons(word, len(word) - 1)


def ends_cvc(word):
    # consonant-vowel-consonant at the end, final consonant not w, x or y
    if len(word) < 3:
        return False
    if not (is_cons(word, len(word) - 1) and not is_cons(word, len(word) - 2)
            and is_cons(word, len(word) - 3)):
        return False
    return word[-1] not in "wxy"


def apply_rules(word, rules, min_m):
    """First (longest-first) suffix match wins; replacement only if m(stem) > min_m."""
    for suffix, repl in sorted(rules, key=lambda r: -len(r[0])):
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if measure(stem) > min_m:
                return stem + repl
            return word
    return word


def step1a(word):
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("ies"):
        return word[:-2]
    if word.endswith("ss"):
        return word
    if word.endswith("s"):
        return word[:-1]
    return word


def step1b(word):
    if word.endswith("eed"):
        return word[:-1] if measure(word[:-3]) > 0 else word
    if word.endswith("ed") and has_vowel(word[:-2]):
        word = word[:-2]
    elif word.endswith("ing") and has_vowel(word[:-3]):
        word = word[:-3]
    else:
        return word
    # cleanup after stripping -ed / -ing
    if word.endswith(("at", "bl", "iz")):
        return word + "e"
    if ends_double_cons(word) and word[-1] not in "lsz":
        return word[:-1]
    if measure(word) == 1 and ends_cvc(word):
        return word + "e"
    return word


def step1c(word):
    if word.endswith("y") and has_vowel(word[:-1]):
        return word[:-1] + "i"
    return word


STEP2 = [
    ("ational", "ate"), ("tional", "tion"),
    ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"),
    ("bli", "ble"),  # amended rule, replaces abli -> able
    ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous"),
    ("ization", "ize"), ("ation", "ate"), ("ator", "ate"),
    ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous"),
    ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    ("logi", "log"),  # amended rule, added after publication
]

STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"),
    ("iciti", "ic"), ("ical", "ic"), ("ful", ""), ("ness", ""),
]

STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment",
    "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def step4(word):
    for suffix in sorted(STEP4, key=len, reverse=True):
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if suffix == "ion" and not (stem and stem[-1] in "st"):
                continue  # -ion only drops after s or t; try shorter suffixes
            if measure(stem) > 1:
                return stem
            return word
    return word


def step5a(word):
    if word.endswith("e"):
        m = measure(word)
        if m > 1 or (m == 1 and not ends_cvc(word[:-1])):
            return word[:-1]
    return word


def step5b(word):
    if word.endswith("ll") and measure(word) > 1:
        return word[:-1]
    return word


def stem(word):
    if len(word) <= 2:
        return word
    word = step1a(word)
    word = step1b(word)
    word = step1c(word)
    word = apply_rules(word, STEP2, 0)
    word = apply_rules(word, STEP3, 0)
    word = step4(word)
    word = step5a(word)
    word = step5b(word)
    return word


# Classic demonstration words for every rule family, the two amended rules,
# boundary lengths, plus ordinary vocabulary in the registers the engine will
# actually see (news/encyclopedia prose).
WORDS = """
caresses ponies ties caress cats gas gaps mass abyss classes glasses
feed agreed plastered bled motoring sing conflated troubled sized hopping
tanned falling hissing fizzed failing filing hoping singing begging running
settling dying lying tying flying studied studies carried carries
happy sky apology fly cry study party parties
relational conditional rational sensational operational national international
emergency emergencies hesitancy agencies agency
organizer digitizer possibly terribly trembly
radically typically practically differently evidently lovely famously
obviously generously
organization civilization modernization information restoration starvation
combination exploration irrigation
operator generator educator
nationalism feudalism capitalism
effectiveness attractiveness responsiveness
hopefulness usefulness carefulness
seriousness consciousness nervousness
formality vitality reality technicality
sensitivity productivity activity
responsibility flexibility stability reliability
geology apology archaeology technology biology biologist
duplicate certificate delicate
informative talkative formative
normalize capitalize realize
electricity authenticity simplicity
historical practical identical electrical
hopeful useful
darkness goodness kindness weakness
revival allowance inference airliner adjustable defensible irritant
replacement adjustment dependent adoption communism activate effective
bowdlerize
probate rate cease controlling rolling controlled enrolled
generalizations oscillators
farmers farming statements subsidies subsidy agriculture agricultural
economic economics restoration restoring restored renewable energy turbines
flooding flooded warnings coastal monitoring monitors temples archaeological
conservation heritage vendors hygiene inspections regulations regulated
safety systems system sensors evacuation drills rivers levels rainfall
forecasting forecasts authorities alerts sirens barriers embankments
masonry carvings artifacts excavation restorers stonework frescoes
windmills rotors blades megawatts electricity grids offshore onshore
stalls vendors permits licenses inspectors sanitation gloves utensils
ingredients spices markets customers tourism
water life spaces orbit planets planetary moons oceans bacteria organisms
missions telescope telescopes discovery discovered searching
query queries expansion expanded expanding terms weighting weighted
retrieval retrieved ranking ranked relevance relevant judgments
documents document corpus corpora engines engine searching searched
precision recall measure measured average averaged experiments
baseline baselines improvement improved performance collections
snippets snippet pages webpage website crawling crawled parsing parsed
apple apples running runner runs easily noisy noise noisier
connect connected connecting connection connections
argue argued argues arguing argument arguments
happiness unhappiness friendliness loneliness
beautiful beautifully wonderful wonderfully
maximize minimize optimization optimized optimizer
create created creation creative creativity creator
analyze analyzed analysis analyst
politics political politician politically
educate education educational educated
decide decided decision decisive
introduce introduction introductory
produce production productive reproduce
describe description descriptive
explain explained explanation explanatory
compute computer computation computational computing
science scientific scientist
nature natural naturally naturalist
act action active actively activist
able ability abilities enable enabled
use used uses using user users
"""


def main():
    words = sorted(set(WORDS.split()))
    for w in words:
        print(f"{w}\t{stem(w)}")


if __name__ == "__main__":
    main()
