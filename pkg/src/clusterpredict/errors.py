"""Exception hierarchy shared by all modules."""


class ClusterPredictError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(ClusterPredictError, ValueError):
    """A parameter is outside its documented range."""


# corpus loading / splitting
class MissingColumn(ClusterPredictError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing column"


class BadLabel(ClusterPredictError, ValueError):
    pass


class EmptyCorpus(ClusterPredictError, ValueError):
    pass


class EmptyText(ClusterPredictError, ValueError):
    pass


class MalformedCsv(ClusterPredictError, ValueError):
    pass


class TooFewDocuments(ClusterPredictError, ValueError):
    pass


# features
class EmptyVocabulary(ClusterPredictError, ValueError):
    pass


# shapes shared by models
class DimensionMismatch(ClusterPredictError, ValueError):
    pass


class ShapeMismatch(ClusterPredictError, ValueError):
    pass


class LengthMismatch(ClusterPredictError, ValueError):
    pass


class EmptyInput(ClusterPredictError, ValueError):
    pass


class EmptyMatrix(ClusterPredictError, ValueError):
    pass


# clustering
class KTooLarge(ClusterPredictError, ValueError):
    pass


# trees
class EmptyCounts(ClusterPredictError, ValueError):
    pass


class MtryTooLarge(ClusterPredictError, ValueError):
    pass


class VocabMismatch(ClusterPredictError, ValueError):
    pass


class IndexOutOfRange(ClusterPredictError, IndexError):
    pass


# linear models
class NonFiniteLoss(ClusterPredictError, ArithmeticError):
    pass


class LambdaZero(ClusterPredictError, ValueError):
    pass


# evaluation
class OneClassOnly(ClusterPredictError, ValueError):
    pass
