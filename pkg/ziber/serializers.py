from rest_framework import serializers

from .datasets import CsvSchema
from .estimation import FitConfig
from .exceptions import ZiberError
from .links import LinkKind
from .simulation import GENERATORS, Scenario

UINT64_MAX = 2 ** 64 - 1


def flatten_errors(detail, prefix=''):
    """DRF error detail as 'path: message' lines, e.g. 'x_spec[1].sd: ...'."""
    if isinstance(detail, dict):
        lines = []
        for key, value in detail.items():
            if key == 'non_field_errors':
                path = prefix
            else:
                path = f'{prefix}.{key}' if prefix else str(key)
            lines.extend(flatten_errors(value, path))
        return lines
    if isinstance(detail, list):
        lines = []
        for index, value in enumerate(detail):
            if isinstance(value, (dict, list)):
                lines.extend(flatten_errors(value, f'{prefix}[{index}]'))
            else:
                lines.extend(flatten_errors(value, prefix))
        return lines
    return [f'{prefix}: {detail}' if prefix else str(detail)]


class FitConfigSerializer(serializers.Serializer):
    max_iters = serializers.IntegerField(min_value=1, required=False)
    grad_tol = serializers.FloatField(required=False)
    n_restarts = serializers.IntegerField(min_value=1, required=False)
    eps_lower = serializers.FloatField(required=False)
    eps_upper = serializers.FloatField(required=False)
    seed = serializers.IntegerField(min_value=0, max_value=UINT64_MAX, required=False)

    def validate_grad_tol(self, value):
        if not value > 0:
            raise serializers.ValidationError('Ensure this value is greater than 0.')
        return value

    def validate(self, attrs):
        lower, upper = attrs.get('eps_lower'), attrs.get('eps_upper')
        if (lower is None) != (upper is None):
            raise serializers.ValidationError('eps_lower and eps_upper must be given together.')
        if lower is not None and not lower < upper:
            raise serializers.ValidationError({'eps_upper': 'Must be greater than eps_lower.'})
        return attrs

    def create(self, validated_data):
        lower = validated_data.pop('eps_lower', None)
        upper = validated_data.pop('eps_upper', None)
        if lower is not None:
            validated_data['eps_bounds'] = (lower, upper)
        return FitConfig.from_settings(**validated_data)


class CsvSchemaSerializer(serializers.Serializer):
    y = serializers.CharField()
    x = serializers.ListField(child=serializers.CharField(), required=False, default=list)
    z = serializers.ListField(child=serializers.CharField(), required=False, default=list)

    def validate(self, attrs):
        names = [attrs['y'], *attrs['x'], *attrs['z']]
        repeated = sorted({name for name in names if names.count(name) > 1})
        if repeated:
            raise serializers.ValidationError(f'Column names must be distinct: {", ".join(repeated)}.')
        return attrs

    def create(self, validated_data):
        return CsvSchema(
            y_col=validated_data['y'],
            x_cols=validated_data['x'],
            z_cols=validated_data['z'],
        )


class CovariateSpecSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=sorted(GENERATORS))
    mean = serializers.FloatField(required=False)
    sd = serializers.FloatField(required=False)
    rate = serializers.FloatField(required=False)
    p = serializers.FloatField(required=False)
    low = serializers.IntegerField(required=False)
    high = serializers.IntegerField(required=False)

    def validate(self, attrs):
        errors = {}
        if 'sd' in attrs and not attrs['sd'] > 0:
            errors['sd'] = 'Ensure this value is greater than 0.'
        if 'rate' in attrs and not attrs['rate'] > 0:
            errors['rate'] = 'Ensure this value is greater than 0.'
        if 'p' in attrs and not 0 < attrs['p'] < 1:
            errors['p'] = 'Ensure this value lies strictly between 0 and 1.'
        if 'low' in attrs and 'high' in attrs and attrs['high'] < attrs['low']:
            errors['high'] = 'Ensure this value is not less than low.'
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    @staticmethod
    def build(attrs):
        attrs = dict(attrs)
        generator = GENERATORS[attrs.pop('kind')]
        try:
            return generator(**attrs)
        except TypeError:
            raise serializers.ValidationError(
                f'Unexpected parameters for {generator.kind}: {", ".join(sorted(attrs))}.'
            ) from None


class ScenarioSerializer(serializers.Serializer):
    name = serializers.CharField(required=False, default='custom')
    link = serializers.ChoiceField(choices=LinkKind.choices)
    gamma = serializers.ListField(child=serializers.FloatField(), min_length=1)
    eta = serializers.ListField(child=serializers.FloatField(), min_length=1)
    eps = serializers.FloatField(required=False, allow_null=True, default=None)
    fix_eps = serializers.BooleanField(required=False, default=False)
    x_spec = CovariateSpecSerializer(many=True)
    z_spec = CovariateSpecSerializer(many=True)
    event_columns = serializers.ListField(
        child=serializers.IntegerField(min_value=0), required=False, allow_null=True, default=None
    )

    def validate(self, attrs):
        errors = {}
        specs = {}
        for key in ('x_spec', 'z_spec'):
            built, field_errors = [], []
            for item in attrs[key]:
                try:
                    built.append(CovariateSpecSerializer.build(item))
                    field_errors.append({})
                except serializers.ValidationError as exc:
                    field_errors.append({'non_field_errors': exc.detail})
            if any(field_errors):
                errors[key] = field_errors
            specs[key] = built
        if errors:
            raise serializers.ValidationError(errors)
        attrs = {**attrs, **specs}
        try:
            attrs['scenario'] = Scenario(
                name=attrs['name'],
                link=attrs['link'],
                gamma=attrs['gamma'],
                eta=attrs['eta'],
                eps=attrs['eps'],
                fix_eps=attrs['fix_eps'],
                x_spec=attrs['x_spec'],
                z_spec=attrs['z_spec'],
                event_columns=attrs['event_columns'],
            )
        except (ZiberError, ValueError) as exc:
            raise serializers.ValidationError(str(exc)) from None
        return attrs

    def create(self, validated_data):
        return validated_data['scenario']
