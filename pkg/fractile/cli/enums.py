from enum import IntEnum, StrEnum


class Command(StrEnum):
    """Подкоманды CLI."""

    VALIDATE = "validate"
    HULL = "hull"
    TILES = "tiles"
    RENDER = "render"
    DIMS = "dims"
    ZETA_EVAL = "zeta-eval"
    TUBE = "tube"


class ExitCode(IntEnum):
    """Коды выхода.

    Attributes
        OK: Успех.
        DOMAIN: Нарушено математическое условие (недопустимая система и т.п.).
        INPUT: Некорректный вход.
        BUDGET: Превышен лимит перебора.

    """

    OK = 0
    DOMAIN = 1
    INPUT = 2
    BUDGET = 3
