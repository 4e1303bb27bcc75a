"""Pure applicability rules shared by runtime and client.

A breakpoint type applies at a location when its tag list intersects the
location's tags; an empty tag list applies everywhere. A stepping type
additionally filters on the suspended activity's type and active dynamic
scopes; the three criteria are conjunctive and empty lists are wildcards.
"""

from __future__ import annotations

from polydbg.protocol.catalog import MetaDataCatalog


def applicable_breakpoints(tags: frozenset[str] | set[str],
                           catalog: MetaDataCatalog) -> list[str]:
    out = []
    for bp in catalog.breakpoint_types:
        if not bp.applicable_tags or set(bp.applicable_tags) & set(tags):
            out.append(bp.name)
    return out


def applicable_stepping_ops(tags: frozenset[str] | set[str],
                            activity_type_label: str,
                            scope_type_labels: list[str] | tuple[str, ...],
                            catalog: MetaDataCatalog) -> list[str]:
    activity_id = None
    for t in catalog.activity_types:
        if t.label == activity_type_label:
            activity_id = t.id
    scope_ids = {t.id for t in catalog.dynamic_scope_types if t.label in set(scope_type_labels)}
    out = []
    for op in catalog.stepping_types:
        if op.applicable_tags and not set(op.applicable_tags) & set(tags):
            continue
        if op.applicable_activity_type_ids and activity_id not in op.applicable_activity_type_ids:
            continue
        if op.applicable_scope_type_ids and not set(op.applicable_scope_type_ids) & scope_ids:
            continue
        out.append(op.name)
    return out
