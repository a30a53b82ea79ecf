class AspError(Exception):
    pass


class AspSyntaxError(AspError):
    def __init__(self, line: int, column: int, expected: str, found: str = ""):
        self.line, self.column, self.expected, self.found = line, column, expected, found
        msg = f"line {line}, column {column}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class UnsupportedConstruct(AspError):
    def __init__(self, name: str, line: int = 0, column: int = 0):
        self.name, self.line, self.column = name, line, column
        super().__init__(f"unsupported construct {name!r} at line {line}, column {column}")


class UnsafeRule(AspError):
    def __init__(self, rule, violations):
        self.rule, self.violations = rule, violations
        super().__init__(f"unsafe rule {rule}: " + "; ".join(str(v) for v in violations))


class UniverseTooLarge(AspError):
    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(f"grounding would exceed {limit} rule instances")


class GroundingTimeout(AspError):
    pass


class TooManyAtoms(AspError):
    def __init__(self, count: int, cap: int):
        self.count, self.cap = count, cap
        super().__init__(f"{count} atoms exceed brute-force cap of {cap}")


class SolveTimeout(AspError):
    def __init__(self, elapsed: float):
        self.elapsed = elapsed
        super().__init__(f"solver timed out after {elapsed:.2f}s")


class IterationUnsat(AspError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"no answer set at iteration {index}")


class EngineTimeout(AspError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"engine timed out at iteration {index}")


class ExternalEngineError(AspError):
    def __init__(self, message: str, exit_code=None, stderr: str = ""):
        self.exit_code, self.stderr = exit_code, stderr
        super().__init__(message)


class ModelParseError(ExternalEngineError):
    def __init__(self, line: str):
        self.line = line
        super().__init__(f"cannot parse model line {line!r}")


class ConfigError(AspError):
    pass
