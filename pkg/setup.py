from setuptools import setup, find_packages

setup(name='lyapid',
      version='0.1.0',
      description='Exact equivalence and identifiability checks for graphical continuous Lyapunov models',
      classifiers=['Development Status :: 3 - Alpha',
                   'Programming Language :: Python',
                   'Programming Language :: Python :: 3',
                   'Operating System :: OS Independent',
                   'Intended Audience :: Science/Research',
                   'Topic :: Scientific/Engineering :: Mathematics'],
      install_requires=['networkx', 'numpy', 'openpyxl', 'pyyaml', 'sqlalchemy', 'tqdm'],
      python_requires='>=3.9',
      packages=find_packages(exclude=['*test']),
      package_data={
          # If any (sub-)package contains *.yaml files, include them:
          '': ['*.yaml']
      },
      entry_points={
          'console_scripts': [
              'lyapid = lyapid.script:main',
              'dump_census_db = lyapid.script:dump_db',
          ],
      },
      zip_safe=False
      )
