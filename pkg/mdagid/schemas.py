"""
JSON schemas of every command's output body. Bodies are validated before
they are printed.
"""
import jsonschema

RATIONAL = {'type': 'string', 'pattern': r'^-?\d+/\d+$'}
NAMES = {'type': 'array', 'items': {'type': 'string'}}
ASSIGNMENT = {'type': 'object', 'additionalProperties': {'type': ['integer', 'null']}}
NULLABLE_OBJECT = {'type': ['object', 'null']}

VIOLATION = {
    'type': 'object',
    'required': ['kind', 'message', 'vertices'],
    'properties': {
        'kind': {'type': 'string'},
        'message': {'type': 'string'},
        'vertices': NAMES,
        'line': {'type': 'integer'},
        'column': {'type': 'integer'},
    },
}

GRAPH = {
    'type': 'object',
    'required': ['observed', 'partial', 'indicators', 'edges', 'mono', 'cardinalities'],
    'properties': {
        'observed': NAMES,
        'partial': NAMES,
        'indicators': NAMES,
        'edges': {'type': 'array', 'items': {'type': 'array', 'items': {'type': 'string'}, 'minItems': 2, 'maxItems': 2}},
        'mono': {'type': 'array', 'items': {'type': 'array', 'items': {'type': 'string'}, 'minItems': 2, 'maxItems': 2}},
        'cardinalities': {'type': 'object', 'additionalProperties': {'type': 'integer', 'minimum': 2}},
    },
}

VALIDATE = {
    'type': 'object',
    'required': ['spec', 'valid', 'violations'],
    'properties': {
        'spec': GRAPH,
        'valid': {'type': 'boolean'},
        'violations': {'type': 'array', 'items': VIOLATION},
    },
}

DETECT = {
    'type': 'object',
    'required': ['colluders', 'maximal_colluders', 'self_censoring_edges', 'self_censoring_paths'],
    'properties': {
        'colluders': {'type': 'array', 'items': {
            'type': 'object',
            'required': ['variable', 'indicator', 'target'],
        }},
        'maximal_colluders': {'type': 'array', 'items': {
            'type': 'object',
            'required': ['c_set', 'target', 'monotone'],
            'properties': {'c_set': NAMES, 'target': {'type': 'string'}, 'monotone': {'type': 'boolean'}},
        }},
        'self_censoring_edges': {'type': 'array', 'items': {
            'type': 'object', 'required': ['variable', 'indicator'],
        }},
        'self_censoring_paths': {'type': 'array', 'items': {
            'type': 'object',
            'required': ['variable', 'indicator_chain'],
            'properties': {'indicator_chain': {**NAMES, 'minItems': 1}},
        }},
    },
}

THEOREM_APPLICATION = {
    'type': 'object',
    'required': ['theorem', 'target', 'context', 'guards', 'ci_obligations', 'functional'],
    'properties': {
        'theorem': {'enum': ['T1', 'T2', 'T3', 'T4', 'T5', 'Fallback', 'Mohan']},
        'via': {'type': ['string', 'null']},
        'target': {'type': 'string'},
        'context': ASSIGNMENT,
        'z_set': NAMES,
        'r_prime': NAMES,
        'w_set': NAMES,
        'd_set': NAMES,
        'guards': {'type': 'array', 'items': ASSIGNMENT},
        'ci_obligations': {'type': 'array', 'items': {
            'type': 'object',
            'required': ['A', 'B', 'Z', 'ctx', 'verdict'],
            'properties': {
                'verdict': {
                    'type': 'object',
                    'required': ['status', 'reason'],
                    'properties': {'status': {'enum': ['Holds', 'UndefinedContext', 'Unknown', 'NotSeparated']}},
                },
            },
        }},
        'functional': {'type': ['string', 'null']},
    },
}

IDENTIFY = {
    'type': 'object',
    'required': ['status', 'reason', 'witness', 'message', 'provenance', 'functional'],
    'properties': {
        'status': {'enum': ['Identified', 'NotIdentifiable', 'Unknown']},
        'reason': {'enum': [None, 'SelfCensoringEdge', 'SelfCensoringPath', 'Colluder',
                            'NoApplicableTheorem', 'AncestorOfOwnIndicator']},
        'witness': NULLABLE_OBJECT,
        'message': {'type': 'string'},
        'provenance': {'type': 'array', 'items': THEOREM_APPLICATION},
        'functional': {
            'type': ['object', 'null'],
            'required': ['text', 'tree'],
            'properties': {'text': {'type': 'string'}, 'tree': {'type': 'object', 'required': ['kind']}},
        },
    },
}

MODEL_CHECK = {
    'type': 'object',
    'required': ['seed', 'passed', 'rows', 'witness'],
    'properties': {
        'seed': {'type': 'integer'},
        'passed': {'type': 'boolean'},
        'rows': {'type': 'integer'},
        'witness': {
            'type': ['object', 'null'],
            'required': ['cell', 'expected'],
            'properties': {'cell': ASSIGNMENT, 'expected': RATIONAL, 'got': RATIONAL, 'error': {'type': 'string'}},
        },
    },
}

VERIFY = {
    'type': 'object',
    'required': ['identification', 'report'],
    'properties': {
        'identification': {'oneOf': [IDENTIFY, {'type': 'null'}]},
        'report': {
            'type': ['object', 'null'],
            'required': ['functional', 'query', 'n', 'passed', 'failures', 'first_failure', 'warnings'],
            'properties': {
                'functional': {'type': 'string'},
                'query': {'type': 'object', 'required': ['kind']},
                'n': {'type': 'integer', 'minimum': 0},
                'passed': {'type': 'boolean'},
                'failures': {'type': 'integer', 'minimum': 0},
                'first_failure': {'oneOf': [MODEL_CHECK, {'type': 'null'}]},
                'warnings': {'type': 'array', 'items': {'type': 'string'}},
            },
        },
    },
}

CELL_DIFFERENCE = {
    'type': 'object',
    'required': ['cell', 'p1', 'p2'],
    'properties': {'cell': ASSIGNMENT, 'p1': RATIONAL, 'p2': RATIONAL},
}

COUNTEREXAMPLE = {
    'type': 'object',
    'required': ['kind', 'constructions', 'comparison'],
    'properties': {
        'kind': {'enum': ['thm6', 'appendix']},
        'constructions': {'type': 'array', 'items': {'type': 'object', 'required': ['kind']}},
        'comparison': {
            'type': ['object', 'null'],
            'required': ['observed_equal', 'observed_differences', 'full_law_differences'],
            'properties': {
                'observed_equal': {'type': 'boolean'},
                'observed_differences': {'type': 'array', 'items': CELL_DIFFERENCE},
                'full_law_differences': {'type': 'array', 'items': CELL_DIFFERENCE},
                'marginal': {
                    'type': 'object',
                    'required': ['variables', 'rows'],
                    'properties': {
                        'variables': NAMES,
                        'rows': {'type': 'array', 'items': {
                            'type': 'object',
                            'required': ['values', 'p1', 'p2'],
                            'properties': {'p1': RATIONAL, 'p2': RATIONAL},
                        }},
                    },
                },
            },
        },
    },
}

OR_CHECK = {
    'type': 'object',
    'required': ['ordering', 'n', 'seed', 'exact', 'cells_checked', 'mismatch_count',
                 'zero_denominator_count', 'failures'],
    'properties': {
        'ordering': NAMES,
        'n': {'type': 'integer', 'minimum': 0},
        'seed': {'type': 'integer'},
        'exact': {'type': 'boolean'},
        'cells_checked': {'type': 'integer', 'minimum': 0},
        'mismatch_count': {'type': 'integer', 'minimum': 0},
        'zero_denominator_count': {'type': 'integer', 'minimum': 0},
        'failures': {'type': 'array', 'items': {
            'type': 'object',
            'required': ['seed', 'mismatches', 'zero_denominators'],
        }},
    },
}

ERROR = {
    'type': 'object',
    'required': ['error', 'message'],
    'properties': {
        'error': {'type': 'string'},
        'message': {'type': 'string'},
        'line': {'type': 'integer'},
        'column': {'type': 'integer'},
        'violations': {'type': 'array', 'items': {'type': 'string'}},
    },
}

SCHEMAS = {
    'validate': VALIDATE,
    'detect': DETECT,
    'identify-full': IDENTIFY,
    'identify-target': IDENTIFY,
    'verify': VERIFY,
    'counterexample': COUNTEREXAMPLE,
    'or-check': OR_CHECK,
}


def schema_for(command, body):
    if 'error' in body:
        return ERROR
    return SCHEMAS[command]


def validate_output(command, body):
    """Raise jsonschema.ValidationError when body does not match the command's schema"""
    jsonschema.validate(instance=body, schema=schema_for(command, body))
