"""
Errors raised while building the spin-chain model
"""


class SpinChainError(Exception):
    pass


class ChainParamsError(SpinChainError, ValueError):
    """Carries every violated parameter invariant, not only the first."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__('Invalid chain parameters: ' + '; '.join(self.problems))


class SiteIndexError(SpinChainError, IndexError):
    pass


class NormalizationError(SpinChainError, ValueError):
    pass
