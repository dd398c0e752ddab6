from setuptools import find_packages, setup

setup(
    name='ziber',
    version='0.1.0',
    description='Zero-inflated Bernoulli regression: MLE, simulation studies and Vuong model selection',
    packages=find_packages(exclude=['ziber.tests']),
    python_requires='>=3.10',
    install_requires=[
        'Django>=4.2,<5',
        'djangorestframework>=3.14',
        'numpy>=1.26',
        'scipy>=1.11',
        'pandas>=2.0',
    ],
    extras_require={
        'test': ['pytest>=8', 'pytest-django>=4.7'],
    },
    entry_points={
        'console_scripts': ['ziber=ziber.cli:main'],
    },
)
