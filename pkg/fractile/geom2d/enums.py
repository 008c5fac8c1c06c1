from enum import StrEnum


class MapKind(StrEnum):
    """Тип аффинного отображения.

    Attributes
        SIMILARITY: Подобие ``r·A·x + a`` с ортогональной ``A``.
        GENERAL_AFFINE: Произвольное аффинное сжатие.

    """

    SIMILARITY = "similarity"
    GENERAL_AFFINE = "affine"
