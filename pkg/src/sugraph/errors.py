"""Exception hierarchy shared by all sugraph modules."""


class SugError(Exception):
    """Base class for every error raised by sugraph."""


class UnknownEntity(SugError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class UnknownNode(UnknownEntity):
    pass


class UnknownProject(UnknownEntity):
    pass


class GraphConstraint(SugError, ValueError):
    pass


class DuplicateNode(GraphConstraint):
    pass


class DuplicateEdge(GraphConstraint):
    pass


class SelfDependency(GraphConstraint):
    pass


class NameMismatch(GraphConstraint):
    pass


class TimeOrderViolation(GraphConstraint):
    pass


class ChainConflict(GraphConstraint):
    """An update slot (predecessor or successor) is already occupied."""


class NotSameProject(GraphConstraint):
    pass


class NotPredecessor(GraphConstraint):
    pass


class SamePairMember(GraphConstraint):
    pass


class PairNotInSet(GraphConstraint):
    pass


class NeedTwoProjects(GraphConstraint):
    pass


class AnchorNotInProfile(GraphConstraint):
    pass


class EmptyProfile(GraphConstraint):
    pass


class InputSyntax(SugError, ValueError):
    pass


class FatalSyntax(InputSyntax):
    """Malformed universe-file line encountered in strict mode."""


class MalformedXml(InputSyntax):
    pass


class MissingCoordinates(InputSyntax):
    pass


class ParentMismatch(InputSyntax):
    pass
