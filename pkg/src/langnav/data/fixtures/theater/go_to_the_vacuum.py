def execute_command(image):
    image_patch = ImagePatch(image)
    vacuum_patches = image_patch.find('vacuum')
    if len(vacuum_patches) == 0:
        vacuum_patches = image_patch.find('cleaning machine')
    if len(vacuum_patches) == 0:
        return {'function': 'None', 'error': 'No vacuum found.'}
    target = vacuum_patches[0]
    inputs = (target.horizontal_center, target.vertical_center)
    return {'function': 'navigate_to_object', 'inputs': inputs, 'box': [target.left, target.lower, target.right, target.upper]}
