# External Imports
# Import only with "import package",
# it will make explicity in the code where it came from.

# Turns all annotations into string literals.
# This is one exception to the external import rule.
from __future__ import annotations
import json


class ResultRecord():
    """
    Represents one row of a result table.

    Parameters:
        properties: Column names and values of the row.
    """

    def __init__(self, properties: dict) -> ResultRecord:
        self.properties = properties

    def asdict(self, columns: tuple = None) -> dict:
        """
        Converts the record to a dictionary.

        Arguments:
            columns: If set, the dictionary follows this column order
                and missing columns are set to None.
        """

        if columns is None:
            return dict(self.properties)
        return {column: self.properties.get(column) for column in columns}

    def __str__(self) -> str:
        """Converts the record to a string."""

        return json.dumps(self.properties, indent=4)
