"""Regex extraction: forward and backward patterns, filters, contexts.

Run: python demos/02_regex_extraction.py
"""
from acrox.extract import build_table, match_backward, match_forward, refine_expansion
from acrox.preprocess import split_sentences

s = "using AIX (IBM's UNIX) and PHYP (IBM's hypervisor for POWER systems)"
print("forward AIX: ", match_forward(s, "AIX"))
print("forward PHYP:", match_forward(s, "PHYP"))

s = "carbon samples secondary chemical shifts (SCS)"
hit = match_backward(s, "SCS")
print("backward SCS:", hit, "->", refine_expansion("SCS", hit))

text = (
    "Models vary. BERT stands for Bidirectional Encoder Representations from Transformers. "
    "We train a large language model (LLM) first. Then LLM (low-level machine) code runs. "
    "Samples ran through LC-MS (which is usually used in practice) daily. "
    "Chapter XVII lists the ATCGGU motif and a 12-ACG probe."
)
table = build_table(split_sentences(text))

print()
for key, entry in table.items():
    if entry.expansions:
        for expansion, method in entry.expansions.items():
            print(f"{key:6} {method:8} {expansion}")
    else:
        print(f"{key:6} context  {entry.context}")

print("\nexcluded:")
for x in table.exclusions:
    print(f"  {x.surface:8} {x.reason}")
