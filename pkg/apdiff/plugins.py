"""Very simple plugin attachment system, used to look up weight and
deformation families by name.

"""

class DuplicateFamily(Exception):
    pass

class FamilyRegistry(dict):
    def __setitem__(self, key, val):
        if key in self:
            raise DuplicateFamily(key)
        dict.__setitem__(self, key, val)

class ClassPluginMount(type):
    """Subclasses of a class using this metaclass that define a
    'family' attribute are entered in the root class's registry.

    """
    def __init__(cls, name, bases, attrs):
        if not hasattr(cls, 'registry'):
            cls.registry = FamilyRegistry()
        elif 'family' in attrs:
            cls.registry[attrs['family']] = cls
