"""Graphs of groups: presentations, normal forms, finite quotients, kernels, fillings, Bass-Serre balls."""

from .bass_serre import BassSerreBall, bass_serre_ball
from .core import (
    GogEdge,
    GraphOfGroups,
    Presentation,
    free_product_group,
    free_product_normal_form,
    fundamental_presentation,
    graph_of_groups_to_json,
    quotient_by_vertex_subgroups,
)
from .filling import FilledGroup, FillingSpec, FillingSubgroup, dehn_fill_free, filling_subgroup
from .quotients import Homomorphism, finite_quotient_avoiding, homomorphism_from_json
from .schreier import KernelReport, kernel_subgroup, tietze_eliminate
