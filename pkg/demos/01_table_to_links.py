"""From a categorical table to a link dataset.

Every attribute splits the records into equivalence classes (rows sharing
the attribute's value), and each class becomes a link: a set of record ids
that co-occur. Clustering the table then reduces to finding groups of
entities that explain the links.
"""

import linkclust as lc

SAMPLE = """\
M,A
M,B
F,B
F,A
M,C
F,C
M,C
F,C
F,A
M,B
"""

dataset = lc.loads_table(SAMPLE)
table = dataset.table
print(f"table: {table.n} records x {table.r} attributes")
print("domains per attribute:", lc.attribute_domains(table))

for attribute in range(1, table.r + 1):
    print(f"\npartition induced by attribute {attribute}:")
    for cls in lc.equivalence_classes(table, attribute):
        print("  ", sorted(cls))

links = lc.to_link_dataset(table)
print(f"\nlink dataset: {links.n_entities} entities, {links.n_links} links")
print("export form (attribute TAB value TAB member ids):")
print(lc.format_links(links))

# the link count always equals the sum of the attribute domain sizes
assert links.n_links == sum(len(d) for d in table.domains)
