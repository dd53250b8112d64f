from setuptools import setup, find_packages


def readme():
    with open('README.md') as f:
        return f.read()


setup(
    name='gbm3d',
    version='0.1',
    description='A two-stage block matching and 3D filtering denoiser for grayscale images.',
    packages=find_packages(),
    long_description=readme(),
    python_requires='>=3.8',
    install_requires=[
        'numpy',
        'scipy',        # for the fft correlation of the block matching
        'PyWavelets',   # for the wavelet filter banks
        'pathos',       # for the worker pools
        'jsonpickle',   # for saving parameters and run reports
        'matplotlib',   # for plotting purposes
        'Pillow',       # for reading and writing PGM and PNG images
        'pytest',       # for testing purposes
    ],
    entry_points={
        'console_scripts': ['gbm3d=gbm3d.evaluation.cli:main'],
    },
    setup_requires=['pytest-runner'],
    tests_require=['pytest'],
)
