"""Abstract domains: intervals, templates, their product and Boolean partitioning.

The functions below take elements of any domain and dispatch to the domain the
elements belong to; mixing elements of different domains raises
:class:`~invstream.errors.DomainMismatchError`.
"""

from invstream.domains.base import Domain
from invstream.domains.bounds import INF, NEG_INF
from invstream.domains.box import BoxElement, IntervalDomain
from invstream.domains.partition import MAX_PREDICATES, PartitionDomain, PartitionElement
from invstream.domains.product import ProductDomain, ProductElement
from invstream.domains.space import Space
from invstream.domains.template import Template, TemplateDomain, TemplateElement, default_templates

KINDS = ("interval", "template", "product")


def make_domain(kind, ts_or_vars, partitions=(), templates=None) -> Domain:
    """Domain of ``kind`` over a system's variables, optionally partitioned."""
    space = Space.of(ts_or_vars)
    if kind == "interval":
        dom = IntervalDomain(space)
    elif kind == "template":
        dom = TemplateDomain(space, templates)
    elif kind == "product":
        dom = ProductDomain.over(space, templates)
    else:
        raise ValueError(f"unknown domain kind {kind!r} (expected one of {', '.join(KINDS)})")
    if partitions:
        dom = PartitionDomain(dom, tuple(partitions))
    return dom


def leq(a, b) -> bool:
    return a.domain.leq(a, b)


def join(a, b):
    return a.domain.join(a, b)


def meet(a, b):
    return a.domain.meet(a, b)


def widen(a, b, thresholds=()):
    return a.domain.widen(a, b, thresholds)


def gamma_F(a):
    return a.domain.gamma(a)


def conjuncts(a) -> list:
    return a.domain.conjuncts(a)


def alpha_Q(domain: Domain, state):
    return domain.alpha(state)


def render_element(a) -> str:
    return a.domain.render(a)


__all__ = [
    "BoxElement", "Domain", "INF", "IntervalDomain", "KINDS", "MAX_PREDICATES", "NEG_INF",
    "PartitionDomain", "PartitionElement", "ProductDomain", "ProductElement", "Space",
    "Template", "TemplateDomain", "TemplateElement", "alpha_Q", "conjuncts",
    "default_templates", "gamma_F", "join", "leq", "make_domain", "meet", "render_element",
    "widen",
]
