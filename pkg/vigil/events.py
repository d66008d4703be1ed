from dataclasses import dataclass, fields


@dataclass(frozen=True)
class Event:
    def describe(self) -> str:
        """Compact single-token rendering used in timeline rows, e.g. `ApplyBrake(0.5)`."""
        name = type(self).__name__
        arguments = [self._describe_value(getattr(self, f.name)) for f in fields(self)]
        if not arguments:
            return name
        return f"{name}({':'.join(arguments)})"

    @staticmethod
    def _describe_value(value: object) -> str:
        enum_name = getattr(value, "name", None)
        if isinstance(enum_name, str):
            return enum_name
        return str(value)


class UnknownEventError(Exception):
    pass
