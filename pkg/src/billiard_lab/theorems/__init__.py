"""Checks built on the branch and invariant machinery: root-power audits, tangent-line asymptotics, conic certification."""
